#include "bregman/config.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace bregman {

using nlohmann::json;

namespace {

Eigen::VectorXd to_vector(const json& j, const char* what) {
  if (!j.is_array()) throw ConfigError(std::string(what) + ": expected array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& e = j[i];
    if (e.is_string() && e.get<std::string>() == "inf")
      v[static_cast<Eigen::Index>(i)] = std::numeric_limits<double>::infinity();
    else if (e.is_string() && e.get<std::string>() == "-inf")
      v[static_cast<Eigen::Index>(i)] = -std::numeric_limits<double>::infinity();
    else if (e.is_number())
      v[static_cast<Eigen::Index>(i)] = e.get<double>();
    else
      throw ConfigError(std::string(what) + ": expected numbers or \"inf\"");
  }
  return v;
}

Eigen::MatrixXd to_matrix(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw ConfigError(std::string(what) + ": expected nonempty row array");
  const std::size_t cols = j[0].size();
  Eigen::MatrixXd M(static_cast<Eigen::Index>(j.size()),
                    static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols)
      throw ConfigError(std::string(what) + ": ragged rows");
    for (std::size_t c = 0; c < cols; ++c)
      M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          j[r][c].get<double>();
  }
  return M;
}

ConstraintSet parse_constraint(const json& j) {
  std::string type = j.at("type").get<std::string>();
  if (type == "simplex") return ConstraintSet::simplex(j.at("n").get<int>());
  if (type == "polytope")
    return ConstraintSet::polytope(to_matrix(j.at("A"), "constraint.A"),
                                   to_vector(j.at("b"), "constraint.b"));
  if (type == "box")
    return ConstraintSet::box(to_vector(j.at("lower"), "constraint.lower"),
                              to_vector(j.at("upper"), "constraint.upper"));
  throw ConfigError("unknown constraint type: " + type);
}

SmoothObjective parse_objective(const json& j) {
  std::string type = j.at("type").get<std::string>();
  SmoothObjective f;
  if (type == "linear") {
    Eigen::VectorXd c = to_vector(j.at("c"), "objective.c");
    double k = j.value("constant", 0.0);
    f.label = "linear";
    f.value = [c, k](const Eigen::VectorXd& x) { return c.dot(x) + k; };
    f.grad = [c](const Eigen::VectorXd&) { return c; };
    f.hessian_diag = [n = c.size()](const Eigen::VectorXd&) {
      return Eigen::VectorXd::Zero(n).eval();
    };
    f.convex = true;
    f.affine = true;
    return f;
  }
  if (type == "quadratic") {
    Eigen::MatrixXd Q = to_matrix(j.at("Q"), "objective.Q");
    Eigen::VectorXd q = to_vector(j.at("q"), "objective.q");
    if (Q.rows() != Q.cols() || Q.rows() != q.size())
      throw ConfigError("objective: Q/q shapes disagree");
    Eigen::MatrixXd Qs = 0.5 * (Q + Q.transpose());
    f.label = "quadratic";
    f.value = [Qs, q](const Eigen::VectorXd& x) {
      return 0.5 * x.dot(Qs * x) + q.dot(x);
    };
    f.grad = [Qs, q](const Eigen::VectorXd& x) {
      return (Qs * x + q).eval();
    };
    f.hessian_diag = [d = Qs.diagonal().eval()](const Eigen::VectorXd&) {
      return d;
    };
    f.convex = j.value("convex", false);
    return f;
  }
  throw ConfigError("unknown objective type: " + type);
}

}  // namespace

ProblemInstance random_polytope_instance(int n, int m, unsigned seed,
                                         const KernelSpec& kernel,
                                         double t_bar) {
  if (n < 2 || m < 1 || m >= n)
    throw ConfigError("random_polytope: need 1 <= m < n, n >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // first row strictly positive with unit rhs keeps the set compact; the
  // remaining rows pass through a random strictly positive point
  for (int attempt = 0; attempt < 64; ++attempt) {
    Eigen::MatrixXd A(m, n);
    for (int j = 0; j < n; ++j) A(0, j) = unif(rng);
    Eigen::VectorXd xstar(n);
    for (int j = 0; j < n; ++j) xstar[j] = unif(rng);
    xstar /= A.row(0).dot(xstar);
    for (int i = 1; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
    Eigen::VectorXd b = A * xstar;

    Eigen::MatrixXd R(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) R(i, j) = gauss(rng);
    Eigen::MatrixXd Q =
        R.transpose() * R / double(n) + 0.1 * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd q(n);
    for (int j = 0; j < n; ++j) q[j] = gauss(rng);

    try {
      ConstraintSet set = ConstraintSet::polytope(A, b);
      auto verts = set.vertices();
      if (verts.size() < 2) continue;
      double fmin = std::numeric_limits<double>::infinity(), fmax = -fmin;
      for (const auto& v : verts) {
        double val = 0.5 * v.dot(Q * v) + q.dot(v);
        fmin = std::min(fmin, val);
        fmax = std::max(fmax, val);
      }
      if (fmax - fmin < 1e-6) continue;  // effectively constant on X

      SmoothObjective f;
      f.label = "random convex quadratic";
      f.value = [Q, q](const Eigen::VectorXd& x) {
        return 0.5 * x.dot(Q * x) + q.dot(x);
      };
      f.grad = [Q, q](const Eigen::VectorXd& x) { return (Q * x + q).eval(); };
      f.hessian_diag = [d = Q.diagonal().eval()](const Eigen::VectorXd&) {
        return d;
      };
      f.convex = true;
      return ProblemInstance(std::move(f), std::move(set), kernel,
                             SurrogateKind::Linear, t_bar);
    } catch (const ConstructionError&) {
      continue;  // degenerate draw
    }
  }
  throw ConfigError("random_polytope: no usable instance after 64 draws");
}

ExperimentConfig parse_config(const std::string& text,
                              std::optional<unsigned> seed_override) {
  ExperimentConfig cfg;
  cfg.raw = text;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // count lines up to the error byte for an anchored message
    std::size_t line = 1;
    for (std::size_t i = 0; i < e.byte && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    throw ConfigError("config parse error at line " + std::to_string(line) +
                      ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");

  try {
    cfg.t = j.value("t", 1.0);
    if (!(cfg.t > 0.0)) throw ConfigError("config: t must be positive");

    if (j.contains("instance")) {
      std::string name = j["instance"].get<std::string>();
      if (name == "custom") {
        if (!j.contains("constraint") || !j.contains("objective"))
          throw ConfigError("custom instance needs constraint and objective");
        KernelSpec k = KernelSpec::parse(j.value("kernel", "shannon"));
        SurrogateKind s = parse_surrogate(j.value("surrogate", "linear"));
        cfg.problem = ProblemInstance(parse_objective(j["objective"]),
                                      parse_constraint(j["constraint"]), k, s,
                                      std::max(1.0, cfg.t));
      } else if (name == "random_polytope") {
        unsigned seed = seed_override.value_or(j.value("seed", 0u));
        KernelSpec k = KernelSpec::parse(j.value("kernel", "shannon"));
        cfg.problem = random_polytope_instance(
            j.value("n", 4), j.value("m", 2), seed, k, std::max(1.0, cfg.t));
        if (j.contains("surrogate"))
          cfg.problem = cfg.problem->with_surrogate(
              parse_surrogate(j["surrogate"].get<std::string>()));
      } else {
        if (j.contains("alpha") && name == "poly_trap") {
          std::ostringstream os;
          os << "poly_trap:" << j["alpha"].get<double>();
          name = os.str();
        }
        ProblemInstance p = builtin(name);
        if (j.contains("kernel"))
          p = p.with_kernel(KernelSpec::parse(j["kernel"].get<std::string>()));
        if (j.contains("surrogate"))
          p = p.with_surrogate(
              parse_surrogate(j["surrogate"].get<std::string>()));
        if (cfg.t > p.t_bar)
          p = ProblemInstance(p.f, p.set, p.kernel, p.surrogate, cfg.t);
        cfg.problem = std::move(p);
      }
    }

    cfg.run.t = cfg.t;
    cfg.run.max_iters = j.value("max_iters", 1000);
    if (j.contains("steps")) {
      cfg.run.step_sequence =
          j["steps"].get<std::vector<double>>();
    }
    if (j.contains("stop_r_ext")) {
      if (j["stop_r_ext"].is_null()) cfg.run.stop_r_ext.reset();
      else cfg.run.stop_r_ext = j["stop_r_ext"].get<double>();
    }
    if (j.contains("stop_residual") && !j["stop_residual"].is_null())
      cfg.run.stop_residual = j["stop_residual"].get<double>();
    cfg.run.record_every = j.value("record_every", 1);
    if (cfg.run.record_every < 1)
      throw ConfigError("config: record_every must be >= 1");
    std::string mode = j.value("mode", "linear");
    if (mode == "linear") cfg.run.mode = RunConfig::Mode::Linear;
    else if (mode == "log_domain") cfg.run.mode = RunConfig::Mode::LogDomain;
    else throw ConfigError("config: mode must be linear or log_domain");
    if (j.contains("x0")) cfg.x0 = to_vector(j["x0"], "x0");

    cfg.trap_eps = j.value("eps", 0.1);
    cfg.trap_K = j.value("K", 120);
    cfg.trap_alpha = j.value("alpha", 1.0);
    if (j.contains("instances")) {
      cfg.trap_entropy = false;
      cfg.trap_poly = false;
      for (const auto& e : j["instances"]) {
        std::string s = e.get<std::string>();
        if (s == "entropy") cfg.trap_entropy = true;
        else if (s == "poly") cfg.trap_poly = true;
        else throw ConfigError("config: unknown trap instance " + s);
      }
    }
    cfg.scan_tol = j.value("tol", kStationarityTol);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path,
                                  std::optional<unsigned> seed_override) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), seed_override);
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["t"] = cfg.t;
  j["max_iters"] = cfg.run.max_iters;
  if (cfg.run.stop_r_ext) j["stop_r_ext"] = *cfg.run.stop_r_ext;
  else j["stop_r_ext"] = nullptr;
  if (cfg.run.stop_residual) j["stop_residual"] = *cfg.run.stop_residual;
  j["record_every"] = cfg.run.record_every;
  j["mode"] =
      cfg.run.mode == RunConfig::Mode::Linear ? "linear" : "log_domain";
  if (cfg.x0)
    j["x0"] = std::vector<double>(cfg.x0->data(),
                                  cfg.x0->data() + cfg.x0->size());
  if (cfg.problem) {
    j["kernel"] = cfg.problem->kernel.tag();
    j["surrogate"] = surrogate_name(cfg.problem->surrogate);
  }
  j["eps"] = cfg.trap_eps;
  j["K"] = cfg.trap_K;
  j["alpha"] = cfg.trap_alpha;
  j["tol"] = cfg.scan_tol;
  return j.dump(2);
}

}  // namespace bregman
