#include "bregman/hardness.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "bregman/stationarity.hpp"

namespace bregman {

Eigen::VectorXd TrapConfig::target() const {
  if (spurious_point.size() > 0) return spurious_point;
  Eigen::VectorXd p(2);
  p << 0.0, 1.0;
  return p;
}

void TrapConfig::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw ConstructionError("trap: eps in (0,1)");
  if (!(t > 0.0)) throw ConstructionError("trap: t must be positive");
  if (K < 0) throw ConstructionError("trap: K must be nonnegative");
  if (instance == Instance::Poly && !(alpha > 0.0))
    throw ConstructionError("trap: alpha must be positive");
}

Eigen::VectorXd init_entropy_trap(const TrapConfig& cfg) {
  cfg.validate();
  double decay = std::exp(-cfg.t * cfg.K);
  if (decay < std::numeric_limits<double>::min()) {
    std::ostringstream os;
    os << "init_entropy_trap: e^{-tK} with tK=" << cfg.t * cfg.K
       << " is subnormal in the linear representation; use log-domain mode";
    throw UnderflowError(os.str());
  }
  double x1 = std::sqrt(2.0) * cfg.eps / 2.0 * decay;
  Eigen::VectorXd x0(2);
  x0 << x1, 1.0 - x1;
  return x0;
}

Eigen::VectorXd init_entropy_trap_log(const TrapConfig& cfg) {
  cfg.validate();
  double l1 = std::log(std::sqrt(2.0) * cfg.eps / 2.0) - cfg.t * cfg.K;
  double x1 = std::exp(l1);  // may underflow; log1p keeps l2 exact anyway
  Eigen::VectorXd l(2);
  l << l1, std::log1p(-x1);
  return l;
}

Eigen::VectorXd init_poly_trap(const TrapConfig& cfg) {
  cfg.validate();
  double ap1 = cfg.alpha + 1.0;
  double first = std::pow(2.0 / (cfg.t * cfg.K + std::pow(cfg.eps, -ap1)),
                          1.0 / ap1);
  double second = std::pow(2.0, ap1) / (1.0 + std::pow(2.0, ap1));
  double x1 = std::min(first, second);
  Eigen::VectorXd x0(2);
  x0 << x1, 1.0 - x1;
  return x0;
}

Eigen::Vector2d closed_form_eg_step(const Eigen::Vector2d& x, double t) {
  if (!(x[0] > 0.0 && x[1] > 0.0) || std::abs(x[0] + x[1] - 1.0) > 1e-9)
    throw DomainError("closed_form_eg_step: x must be interior to the simplex");
  if (t < 0.0) throw DomainError("closed_form_eg_step: t must be >= 0");
  double d = x[0] + std::exp(-t) * x[1];
  return Eigen::Vector2d(x[0] / d, std::exp(-t) * x[1] / d);
}

TrapResult run_trap(const TrapConfig& cfg) {
  cfg.validate();
  if (cfg.K < 1) throw ConstructionError("run_trap: K must be >= 1");
  if (cfg.log_domain && cfg.instance == TrapConfig::Instance::Poly)
    throw UnsupportedCombinationError(
        "log-domain mode applies to the Shannon kernel instance only");
  ProblemInstance problem =
      cfg.instance == TrapConfig::Instance::Entropy
          ? builtin("entropy_trap")
          : builtin("poly_trap:" + std::to_string(cfg.alpha));

  Eigen::VectorXd target = cfg.target();
  StationarityReport spurious_check = detect(problem, target, cfg.t);
  if (spurious_check.classification != StationarityClass::Spurious)
    throw ConstructionError(
        "run_trap: configured point is not spurious for this instance");

  RunConfig rc;
  rc.t = cfg.t;
  rc.max_iters = cfg.K;
  rc.stop_r_ext.reset();  // run the full horizon
  rc.record_every = 1;
  rc.mode = cfg.log_domain ? RunConfig::Mode::LogDomain : RunConfig::Mode::Linear;
  rc.force_generic = cfg.force_generic;

  TrapResult out;
  if (cfg.x0_override.size() > 0) {
    out.trajectory = run(problem, cfg.x0_override, rc);
  } else if (cfg.log_domain) {
    out.trajectory = run_log(problem, init_entropy_trap_log(cfg), rc);
  } else {
    Eigen::VectorXd x0 = cfg.instance == TrapConfig::Instance::Entropy
                             ? init_entropy_trap(cfg)
                             : init_poly_trap(cfg);
    out.trajectory = run(problem, x0, rc);
  }
  if (out.trajectory.status == RunStatus::SolverError) return out;

  out.ball_trapped = true;
  for (const auto& pt : out.trajectory.points) {
    if (pt.k == 0 || pt.k > cfg.K) continue;
    if ((pt.x - target).norm() > cfg.eps) out.ball_trapped = false;
  }
  double x1_end = out.trajectory.back().x[0];
  out.end_trapped = x1_end <= std::sqrt(2.0) * cfg.eps;
  out.trapped = cfg.instance == TrapConfig::Instance::Entropy
                    ? out.ball_trapped
                    : out.end_trapped;
  return out;
}

Eigen::VectorXd search_trap_start(const ProblemInstance& problem,
                                  const Eigen::VectorXd& spurious,
                                  const Eigen::VectorXd& interior_ref,
                                  double eps, double t, int K) {
  RunConfig rc;
  rc.t = t;
  rc.max_iters = std::max(K, 1);
  rc.stop_r_ext.reset();
  rc.record_every = 1;

  double theta = 1.0;
  while (theta >= 1e-280) {
    Eigen::VectorXd x0 = spurious + theta * (interior_ref - spurious);
    CoordinatePartition part = classify(x0, problem.kernel);
    if (part.all_interior() && (x0 - spurious).norm() <= eps) {
      Trajectory traj = run(problem, x0, rc);
      if (traj.status != RunStatus::SolverError) {
        bool trapped = true;
        for (const auto& pt : traj.points)
          if ((pt.x - spurious).norm() > eps) trapped = false;
        if (trapped) return x0;
      }
    }
    theta *= 0.5;
  }
  throw SolverError("search_trap_start: no trap-inducing start found");
}

}  // namespace bregman
