#include "bregman/stationarity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

namespace bregman {

namespace {

void require_ok(const UpdateResult& res, const char* where) {
  if (res.status == UpdateStatus::Unbounded)
    throw SolverError(std::string(where) + ": update subproblem is unbounded");
  if (res.status == UpdateStatus::MaxIter)
    throw SolverError(std::string(where) + ": update solver hit iteration cap");
}

// min over mu of ||(g + A^T mu)_I||, the feasibility gap of a subgradient
// vanishing on the interior coordinates; boxes reduce per coordinate.
double interior_feasibility_gap(const ProblemInstance& problem,
                                const Eigen::VectorXd& x,
                                const CoordinatePartition& part,
                                const Eigen::VectorXd& g) {
  if (part.interior.empty()) return 0.0;
  if (problem.set.kind() == ConstraintSet::Kind::Box) {
    const auto& lo = problem.set.lower();
    const auto& hi = problem.set.upper();
    double s2 = 0.0;
    for (int i : part.interior) {
      bool at_lo = std::isfinite(lo[i]) &&
                   std::abs(x[i] - lo[i]) <=
                       kBoundaryTol * std::max(1.0, std::abs(lo[i]));
      bool at_hi = std::isfinite(hi[i]) &&
                   std::abs(x[i] - hi[i]) <=
                       kBoundaryTol * std::max(1.0, std::abs(hi[i]));
      double p = g[i];
      if (at_lo && at_hi) p = 0.0;
      else if (at_lo) p = std::min(g[i], 0.0);
      else if (at_hi) p = std::max(g[i], 0.0);
      s2 += p * p;
    }
    return std::sqrt(s2);
  }
  const Eigen::MatrixXd& A = problem.set.A();
  const int m = problem.set.rows();
  Eigen::MatrixXd Mi(static_cast<Eigen::Index>(part.interior.size()), m);
  Eigen::VectorXd gi(static_cast<Eigen::Index>(part.interior.size()));
  for (std::size_t j = 0; j < part.interior.size(); ++j) {
    Mi.row(static_cast<Eigen::Index>(j)) = A.col(part.interior[j]).transpose();
    gi[static_cast<Eigen::Index>(j)] = g[part.interior[j]];
  }
  Eigen::VectorXd mu = Mi.colPivHouseholderQr().solve(-gi);
  return (gi + Mi * mu).norm();
}

// Subgradient certificate p in dF(x) whose interior-coordinate block is the
// feasibility-gap minimizer; zero there whenever the gap is zero. On the
// boundary coordinates the normal-cone term is left at zero.
Eigen::VectorXd interior_witness(const ProblemInstance& problem,
                                 const Eigen::VectorXd& x,
                                 const CoordinatePartition& part,
                                 const Eigen::VectorXd& g) {
  if (problem.set.kind() == ConstraintSet::Kind::Box) {
    Eigen::VectorXd p = g;
    const auto& lo = problem.set.lower();
    const auto& hi = problem.set.upper();
    for (int i : part.interior) {
      bool at_lo = std::isfinite(lo[i]) &&
                   std::abs(x[i] - lo[i]) <=
                       kBoundaryTol * std::max(1.0, std::abs(lo[i]));
      bool at_hi = std::isfinite(hi[i]) &&
                   std::abs(x[i] - hi[i]) <=
                       kBoundaryTol * std::max(1.0, std::abs(hi[i]));
      if (at_lo && at_hi) p[i] = 0.0;
      else if (at_lo) p[i] = std::min(g[i], 0.0);
      else if (at_hi) p[i] = std::max(g[i], 0.0);
    }
    return p;
  }
  if (part.interior.empty()) return g;
  const Eigen::MatrixXd& A = problem.set.A();
  const int m = problem.set.rows();
  Eigen::MatrixXd Mi(static_cast<Eigen::Index>(part.interior.size()), m);
  Eigen::VectorXd gi(static_cast<Eigen::Index>(part.interior.size()));
  for (std::size_t j = 0; j < part.interior.size(); ++j) {
    Mi.row(static_cast<Eigen::Index>(j)) = A.col(part.interior[j]).transpose();
    gi[static_cast<Eigen::Index>(j)] = g[part.interior[j]];
  }
  Eigen::VectorXd mu = Mi.colPivHouseholderQr().solve(-gi);
  return g + A.transpose() * mu;
}

}  // namespace

double measure_R(const ProblemInstance& problem, const Eigen::VectorXd& x,
                 double t) {
  UpdateResult res = bregman_update(problem, x, t);
  require_ok(res, "measure_R");
  return bregman_vec(problem.kernel, res.y, x);
}

double measure_R_ext(const ProblemInstance& problem, const Eigen::VectorXd& x,
                     double t) {
  CoordinatePartition part = classify(x, problem.kernel);
  UpdateResult res = extended_update(problem, x, t);
  require_ok(res, "measure_R_ext");
  double s = 0.0;
  for (int i : part.interior) s += problem.kernel.bregman(res.y[i], x[i]);
  return s;
}

std::string to_string(StationarityClass c) {
  switch (c) {
    case StationarityClass::Stationary: return "stationary";
    case StationarityClass::Spurious: return "spurious";
    case StationarityClass::Nonstationary: return "nonstationary";
  }
  return "?";
}

std::string StationarityReport::to_json() const {
  nlohmann::json j;
  j["r_ext"] = r_ext;
  j["residual"] = euclid_residual;
  j["class"] = to_string(classification);
  if (witness.size() > 0) {
    j["witness"] = std::vector<double>(witness.data(),
                                       witness.data() + witness.size());
  } else {
    j["witness"] = nullptr;
  }
  return j.dump();
}

StationarityReport detect(const ProblemInstance& problem,
                          const Eigen::VectorXd& x, double t, double tol) {
  StationarityReport rep;
  CoordinatePartition part = classify(x, problem.kernel);
  rep.r_ext = measure_R_ext(problem, x, t);
  ResidualResult rr = subdifferential_residual(problem, x);
  rep.euclid_residual = rr.residual;
  Eigen::VectorXd g = problem.f.grad(x);
  rep.interior_gap = interior_feasibility_gap(problem, x, part, g);

  if (rep.euclid_residual <= tol) {
    rep.classification = StationarityClass::Stationary;
    rep.witness = rr.witness;
  } else if (rep.interior_gap <= tol) {
    rep.classification = StationarityClass::Spurious;
    rep.witness = interior_witness(problem, x, part, g);
  } else {
    rep.classification = StationarityClass::Nonstationary;
    rep.witness = rr.witness;
  }
  // both classes are extended fixed points, so the measure must agree
  if (rep.classification != StationarityClass::Nonstationary &&
      rep.r_ext > tol)
    throw SolverError("detect: zero-residual point with nonzero extended "
                      "measure; solver tolerances are inconsistent");
  return rep;
}

std::vector<std::pair<Eigen::VectorXd, StationarityReport>>
find_spurious_candidates(const ProblemInstance& problem, double t,
                         double tol) {
  const auto kind = problem.set.kind();
  if (kind == ConstraintSet::Kind::Box)
    throw PreconditionError(
        "find_spurious_candidates needs a simplex or polytope constraint");
  if (!problem.set.compact())
    throw NonCompactError("find_spurious_candidates: constraint set unbounded");
  if (problem.dim() > 12)
    throw TooLargeError("find_spurious_candidates: dimension above 12");
  if (!problem.f.convex)
    throw PreconditionError(
        "find_spurious_candidates needs the convexity flag on f; run detect "
        "on individual points instead");

  auto verts = problem.set.vertices();
  if (verts.empty()) return {};
  double fmax = -std::numeric_limits<double>::infinity();
  std::vector<double> values;
  values.reserve(verts.size());
  for (const auto& v : verts) {
    values.push_back(problem.f.value(v));
    fmax = std::max(fmax, values.back());
  }
  std::vector<std::pair<Eigen::VectorXd, StationarityReport>> out;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (values[i] < fmax - 1e-9 * (1.0 + std::abs(fmax))) continue;
    StationarityReport rep = detect(problem, verts[i], t, tol);
    if (rep.classification == StationarityClass::Spurious)
      out.emplace_back(verts[i], rep);
  }
  return out;
}

}  // namespace bregman
