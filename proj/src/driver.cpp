#include "bregman/driver.hpp"

#include <charconv>
#include <chrono>
#include <cmath>

#include "bregman/stationarity.hpp"
#include "json.hpp"

namespace bregman {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void append_double(std::string& row, double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                               std::chars_format::general, 17);
  row.append(buf, p);
}

bool log_domain_supported(const ProblemInstance& p) {
  bool linear_like =
      p.surrogate == SurrogateKind::Linear ||
      (p.surrogate == SurrogateKind::FullObjective && p.f.affine);
  return p.kernel.family() == KernelFamily::Shannon &&
         p.set.kind() == ConstraintSet::Kind::Simplex && linear_like;
}

}  // namespace

std::string to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Converged: return "converged";
    case RunStatus::MaxIters: return "max_iters";
    case RunStatus::SolverError: return "solver_error";
  }
  return "?";
}

namespace {

Trajectory run_impl(const ProblemInstance& problem, const Eigen::VectorXd& x0,
                    const Eigen::VectorXd* log_x0, const RunConfig& cfg) {
  if (cfg.max_iters < 1) throw ConfigError("run: max_iters must be >= 1");
  if (x0.size() != problem.dim()) throw DimensionError("run: x0 dimension");
  for (int k = 0; k < cfg.max_iters; ++k) {
    double tk = cfg.step(k);
    if (!(tk > 0.0) || tk > problem.t_bar * (1.0 + 1e-12))
      throw ConfigError("run: step size outside (0, t_bar]");
  }
  const bool log_mode = cfg.mode == RunConfig::Mode::LogDomain;
  if (log_mode && !log_domain_supported(problem))
    throw UnsupportedCombinationError(
        "log-domain mode needs the Shannon kernel on a simplex with a linear "
        "surrogate");
  if (log_x0 == nullptr) {
    for (Eigen::Index i = 0; i < x0.size(); ++i)
      if (!problem.kernel.in_interior(x0[i]))
        throw DomainError("run: x0 must be strictly interior to dom(h)");
    if (!problem.set.contains(x0, 1e-10))
      throw DomainError("run: x0 must be feasible");
  }

  Trajectory traj;
  auto start = Clock::now();
  UpdateOptions opts;
  opts.force_generic = cfg.force_generic;

  Eigen::VectorXd x = x0;
  Eigen::VectorXd log_x;
  if (log_mode)
    log_x = log_x0 ? *log_x0 : x0.array().log().matrix().eval();

  int k = 0;
  while (true) {
    // one lookahead step gives the measure at the current iterate
    double tk = cfg.step(k);
    Eigen::VectorXd next;
    Eigen::VectorXd next_log;
    double r_ext = 0.0;
    try {
      if (log_mode) {
        next_log = eg_step_log(log_x, problem.f.grad(x), tk);
        next = next_log.array().exp().matrix();
        r_ext = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
          // D(y, x) = y (log y - log x) - y + x evaluated from the logs
          double y = next[i];
          r_ext += (y == 0.0 ? 0.0 : y * (next_log[i] - log_x[i]) - y) + x[i];
        }
      } else {
        UpdateResult res = bregman_update(problem, x, tk, opts);
        if (res.status == UpdateStatus::Unbounded)
          throw SolverError("update subproblem unbounded");
        if (res.status == UpdateStatus::MaxIter)
          throw SolverError("update solver hit iteration cap");
        next = res.y;
        r_ext = bregman_vec(problem.kernel, next, x);
      }
    } catch (const Error& e) {
      traj.status = RunStatus::SolverError;
      traj.error = std::string(e.what()) + " at iteration " + std::to_string(k);
      traj.iterations = k;
      TrajectoryPoint pt;
      pt.k = k;
      pt.x = x;
      pt.f = problem.f.value(x);
      pt.r_ext = std::nan("");
      pt.residual = subdifferential_residual(problem, x).residual;
      pt.wall_time = seconds_since(start);
      traj.points.push_back(std::move(pt));
      return traj;
    }

    if (!problem.set.contains(x, 1e-10)) {
      traj.status = RunStatus::SolverError;
      traj.error = "iterate left the constraint set at iteration " +
                   std::to_string(k);
      traj.iterations = k;
      return traj;
    }
    double residual = subdifferential_residual(problem, x).residual;
    bool stop_measure = cfg.stop_r_ext && r_ext <= *cfg.stop_r_ext;
    bool stop_resid = cfg.stop_residual && residual <= *cfg.stop_residual;
    bool last = stop_measure || stop_resid || k == cfg.max_iters;

    if (k % cfg.record_every == 0 || last) {
      TrajectoryPoint pt;
      pt.k = k;
      pt.x = x;
      pt.f = problem.f.value(x);
      pt.r_ext = r_ext;
      pt.residual = residual;
      pt.wall_time = seconds_since(start);
      traj.points.push_back(std::move(pt));
    }
    if (last) {
      traj.status = (stop_measure || stop_resid) ? RunStatus::Converged
                                                 : RunStatus::MaxIters;
      traj.iterations = k;
      return traj;
    }
    x = next;
    if (log_mode) log_x = next_log;
    ++k;
  }
}

}  // namespace

Trajectory run(const ProblemInstance& problem, const Eigen::VectorXd& x0,
               const RunConfig& cfg) {
  return run_impl(problem, x0, nullptr, cfg);
}

Trajectory run_log(const ProblemInstance& problem,
                   const Eigen::VectorXd& log_x0, const RunConfig& cfg) {
  if (cfg.mode != RunConfig::Mode::LogDomain)
    throw ConfigError("run_log: cfg.mode must be log-domain");
  Eigen::VectorXd x0 = log_x0.array().exp().matrix();
  return run_impl(problem, x0, &log_x0, cfg);
}

void write_csv(const Trajectory& traj, std::ostream& os) {
  if (traj.points.empty()) return;
  const Eigen::Index n = traj.points.front().x.size();
  std::string row = "k";
  for (Eigen::Index i = 0; i < n; ++i) row += ",x" + std::to_string(i + 1);
  row += ",r_ext,residual,f\n";
  os << row;
  for (const auto& pt : traj.points) {
    row.clear();
    row += std::to_string(pt.k);
    for (Eigen::Index i = 0; i < n; ++i) {
      row += ',';
      append_double(row, pt.x[i]);
    }
    row += ',';
    append_double(row, pt.r_ext);
    row += ',';
    append_double(row, pt.residual);
    row += ',';
    append_double(row, pt.f);
    row += '\n';
    os << row;
  }
}

std::string summary_json(const Trajectory& traj) {
  nlohmann::json j;
  j["status"] = to_string(traj.status);
  j["iters"] = traj.iterations;
  if (!traj.points.empty()) {
    j["final_f"] = traj.back().f;
    j["final_r_ext"] = traj.back().r_ext;
    j["final_residual"] = traj.back().residual;
  }
  if (!traj.error.empty()) j["error"] = traj.error;
  return j.dump(2);
}

}  // namespace bregman
