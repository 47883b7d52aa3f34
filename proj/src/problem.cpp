#include "bregman/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "bregman/nnls.hpp"

namespace bregman {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Exhaustive basic-solution enumeration for {A x = b, x >= 0}.
std::vector<Eigen::VectorXd> enumerate_basic_solutions(
    const Eigen::MatrixXd& A, const Eigen::VectorXd& b, long max_bases) {
  const int m = static_cast<int>(A.rows());
  const int n = static_cast<int>(A.cols());
  std::vector<Eigen::VectorXd> out;
  if (m == 0 || n == 0) return out;
  if (m > n) return out;

  // C(n, m) candidate bases
  double count = 1.0;
  for (int i = 0; i < m; ++i) count *= double(n - i) / double(i + 1);
  if (count > double(max_bases))
    throw TooLargeError("vertex enumeration: too many basis candidates");

  const double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
  std::vector<int> idx(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) idx[static_cast<std::size_t>(i)] = i;

  auto emit = [&](const std::vector<int>& cols) {
    Eigen::MatrixXd B(m, m);
    for (int j = 0; j < m; ++j) B.col(j) = A.col(cols[static_cast<std::size_t>(j)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(B);
    if (!lu.isInvertible()) return;
    Eigen::VectorXd xb = lu.solve(b);
    if ((xb.array() < -1e-9 * bscale).any()) return;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < m; ++j)
      v[cols[static_cast<std::size_t>(j)]] = std::max(0.0, xb[j]);
    if ((A * v - b).cwiseAbs().maxCoeff() > 1e-8 * bscale) return;
    for (const auto& w : out)
      if ((w - v).cwiseAbs().maxCoeff() <= 1e-9 * bscale) return;
    out.push_back(std::move(v));
  };

  // iterate over m-subsets of [n]
  while (true) {
    emit(idx);
    int i = m - 1;
    while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - m + i) --i;
    if (i < 0) break;
    ++idx[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < m; ++j)
      idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

}  // namespace

double gradient_check(const SmoothObjective& f,
                      const std::vector<Eigen::VectorXd>& points, double step) {
  double worst = 0.0;
  for (const auto& x : points) {
    Eigen::VectorXd g = f.grad(x);
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Eigen::VectorXd hi = x, lo = x;
      double h = step * std::max(1.0, std::abs(x[i]));
      hi[i] += h;
      lo[i] -= h;
      double fd = (f.value(hi) - f.value(lo)) / (2.0 * h);
      double denom = std::max(1.0, std::abs(g[i]));
      worst = std::max(worst, std::abs(fd - g[i]) / denom);
    }
  }
  return worst;
}

ConstraintSet ConstraintSet::simplex(int n) {
  if (n < 1) throw ConstructionError("simplex: dimension must be >= 1");
  ConstraintSet s;
  s.kind_ = Kind::Simplex;
  s.n_ = n;
  s.A_ = Eigen::MatrixXd::Ones(1, n);
  s.b_ = Eigen::VectorXd::Ones(1);
  s.lower_ = Eigen::VectorXd::Zero(n);
  s.upper_ = Eigen::VectorXd::Ones(n);
  return s;
}

ConstraintSet ConstraintSet::polytope(Eigen::MatrixXd A, Eigen::VectorXd b) {
  if (A.rows() != b.size()) throw DimensionError("polytope: A/b row mismatch");
  if (A.rows() < 1 || A.cols() < 1)
    throw ConstructionError("polytope: empty system");
  ConstraintSet s;
  s.kind_ = Kind::Polytope;
  s.n_ = static_cast<int>(A.cols());
  s.A_ = std::move(A);
  s.b_ = std::move(b);

  // strictly feasible point: vertex centroid plus a small multiple of the
  // extreme recession rays. Exact existence test: a coordinate is positive
  // somewhere on the feasible set iff it is positive at a vertex or along a
  // ray, and any positive ray multiple delivers it.
  auto verts = enumerate_basic_solutions(s.A_, s.b_, 1000000);
  if (verts.empty())
    throw ConstructionError("polytope: no basic feasible solution");
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(s.n_);
  for (const auto& v : verts) centroid += v;
  centroid /= double(verts.size());
  Eigen::VectorXd rays = Eigen::VectorXd::Zero(s.n_);
  {
    Eigen::MatrixXd Aa(s.A_.rows() + 1, s.n_);
    Aa.topRows(s.A_.rows()) = s.A_;
    Aa.bottomRows(1).setOnes();
    Eigen::VectorXd ba = Eigen::VectorXd::Zero(s.A_.rows() + 1);
    ba[s.A_.rows()] = 1.0;
    for (const auto& ray : enumerate_basic_solutions(Aa, ba, 1000000))
      rays += ray;
  }
  Eigen::VectorXd point = centroid + 1e-3 * rays;
  if ((point.array() <= 0.0).any())
    throw ConstructionError(
        "polytope: no strictly positive feasible point (some coordinate is "
        "identically zero on the feasible set)");
  s.positive_point_ = point;
  return s;
}

ConstraintSet ConstraintSet::box(Eigen::VectorXd lower, Eigen::VectorXd upper) {
  if (lower.size() != upper.size()) throw DimensionError("box: size mismatch");
  if (lower.size() < 1) throw ConstructionError("box: empty");
  for (Eigen::Index i = 0; i < lower.size(); ++i)
    if (!(lower[i] <= upper[i])) throw ConstructionError("box: lower > upper");
  ConstraintSet s;
  s.kind_ = Kind::Box;
  s.n_ = static_cast<int>(lower.size());
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

bool ConstraintSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != n_) return false;
  if (kind_ == Kind::Box) {
    for (int i = 0; i < n_; ++i)
      if (x[i] < lower_[i] - tol || x[i] > upper_[i] + tol) return false;
    return true;
  }
  if ((x.array() < -tol).any()) return false;
  double bscale = std::max(1.0, b_.cwiseAbs().maxCoeff());
  return (A_ * x - b_).cwiseAbs().maxCoeff() <= tol * bscale;
}

bool ConstraintSet::compact() const {
  switch (kind_) {
    case Kind::Simplex:
      return true;
    case Kind::Box:
      return lower_.allFinite() && upper_.allFinite();
    case Kind::Polytope: {
      // recession cone {A z = 0, z >= 0} is trivial iff the normalized slice
      // {A z = 0, 1^T z = 1, z >= 0} is empty
      Eigen::MatrixXd Aa(A_.rows() + 1, n_);
      Aa.topRows(A_.rows()) = A_;
      Aa.bottomRows(1).setOnes();
      Eigen::VectorXd ba = Eigen::VectorXd::Zero(A_.rows() + 1);
      ba[A_.rows()] = 1.0;
      return enumerate_basic_solutions(Aa, ba, 1000000).empty();
    }
  }
  return false;
}

std::vector<Eigen::VectorXd> ConstraintSet::vertices(long max_bases) const {
  switch (kind_) {
    case Kind::Simplex: {
      std::vector<Eigen::VectorXd> out;
      for (int i = 0; i < n_; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n_);
        e[i] = 1.0;
        out.push_back(std::move(e));
      }
      return out;
    }
    case Kind::Polytope:
      return enumerate_basic_solutions(A_, b_, max_bases);
    case Kind::Box: {
      if (!compact()) throw NonCompactError("box vertices: unbounded box");
      if (n_ > 20) throw TooLargeError("box vertices: dimension too large");
      std::vector<Eigen::VectorXd> out;
      for (long mask = 0; mask < (1L << n_); ++mask) {
        Eigen::VectorXd v(n_);
        for (int i = 0; i < n_; ++i)
          v[i] = (mask >> i) & 1 ? upper_[i] : lower_[i];
        bool dup = false;
        for (const auto& w : out)
          if ((w - v).cwiseAbs().maxCoeff() <= 1e-12) { dup = true; break; }
        if (!dup) out.push_back(std::move(v));
      }
      return out;
    }
  }
  return {};
}

Eigen::VectorXd ConstraintSet::strictly_feasible_point(
    const KernelSpec& kernel) const {
  const double a = kernel.left(), c = kernel.right();
  auto fail = [&](const std::string& why) -> Eigen::VectorXd {
    throw ConstructionError("no strictly feasible interior point: " + why);
  };
  switch (kind_) {
    case Kind::Simplex: {
      double v = 1.0 / double(n_);
      if (!(v > a && v < c)) return fail("simplex barycenter outside int(dom h)");
      return Eigen::VectorXd::Constant(n_, v);
    }
    case Kind::Polytope: {
      auto interior = [&](const Eigen::VectorXd& p) {
        for (int i = 0; i < n_; ++i)
          if (!(p[i] > std::max(a, 0.0) && p[i] < c)) return false;
        return true;
      };
      if (interior(positive_point_)) return positive_point_;
      // bounded kernel domains: a vertex nudged toward the positive point
      // stays feasible, picks up strict positivity, and barely moves
      for (const auto& v : vertices()) {
        Eigen::VectorXd blend = 0.999 * v + 0.001 * positive_point_;
        if (interior(blend)) return blend;
      }
      return fail("no polytope point found inside int(dom h)");
    }
    case Kind::Box: {
      Eigen::VectorXd p(n_);
      for (int i = 0; i < n_; ++i) {
        double lo = std::max(lower_[i], a), hi = std::min(upper_[i], c);
        if (lo > hi) return fail("box and dom(h) do not intersect");
        double v;
        if (std::isfinite(lo) && std::isfinite(hi)) {
          v = lo == hi ? lo : 0.5 * (lo + hi);
        } else if (std::isfinite(lo)) {
          v = lo + 1.0;
        } else if (std::isfinite(hi)) {
          v = hi - 1.0;
        } else {
          v = 0.0;
        }
        if (!(v > a && v < c) || v < lower_[i] || v > upper_[i])
          return fail("degenerate box coordinate on the kernel boundary");
        p[i] = v;
      }
      return p;
    }
  }
  return fail("unreachable");
}

SurrogateKind parse_surrogate(const std::string& name) {
  if (name == "linear") return SurrogateKind::Linear;
  if (name == "quadratic_diag") return SurrogateKind::QuadraticDiag;
  if (name == "full_objective") return SurrogateKind::FullObjective;
  throw ConfigError("unknown surrogate: " + name);
}

std::string surrogate_name(SurrogateKind s) {
  switch (s) {
    case SurrogateKind::Linear: return "linear";
    case SurrogateKind::QuadraticDiag: return "quadratic_diag";
    case SurrogateKind::FullObjective: return "full_objective";
  }
  return "?";
}

ProblemInstance::ProblemInstance(SmoothObjective f_, ConstraintSet set_,
                                 KernelSpec kernel_, SurrogateKind surrogate_,
                                 double t_bar_)
    : f(std::move(f_)),
      set(std::move(set_)),
      kernel(kernel_),
      surrogate(surrogate_),
      t_bar(t_bar_) {
  if (!(t_bar > 0.0)) throw ConstructionError("t_bar must be positive");
  if (!f.value || !f.grad) throw ConstructionError("objective oracles missing");
  x_interior = set.strictly_feasible_point(kernel);
}

ProblemInstance ProblemInstance::with_kernel(const KernelSpec& k) const {
  return ProblemInstance(f, set, k, surrogate, t_bar);
}

ProblemInstance ProblemInstance::with_surrogate(SurrogateKind s) const {
  return ProblemInstance(f, set, kernel, s, t_bar);
}

AssumptionReport check_assumptions(const ProblemInstance& problem) {
  AssumptionReport rep;
  const auto& set = problem.set;
  const auto& k = problem.kernel;
  const double a = k.left(), c = k.right();

  // (a) X inside cl(dom h) componentwise
  switch (set.kind()) {
    case ConstraintSet::Kind::Simplex:
      rep.domain_inclusion = a <= 0.0 && c >= 1.0;
      break;
    case ConstraintSet::Kind::Box: {
      rep.domain_inclusion = true;
      for (int i = 0; i < set.dim(); ++i) {
        if (set.lower()[i] < a || set.upper()[i] > c) {
          rep.domain_inclusion = false;
          break;
        }
      }
      break;
    }
    case ConstraintSet::Kind::Polytope: {
      rep.domain_inclusion = a <= 0.0;
      if (rep.domain_inclusion && std::isfinite(c)) {
        try {
          for (const auto& v : set.vertices())
            if (v.maxCoeff() > c + 1e-9) rep.domain_inclusion = false;
          if (!set.compact()) rep.domain_inclusion = false;
        } catch (const TooLargeError&) {
          rep.domain_inclusion = false;
        }
      }
      break;
    }
  }
  rep.domain_note = rep.domain_inclusion
                        ? "constraint set contained in cl(dom h)"
                        : "constraint set leaves cl(dom h)";

  // (b) strictly feasible interior point
  try {
    rep.interior_point = set.strictly_feasible_point(k);
    rep.strict_interior = true;
    rep.interior_note = "strictly feasible interior point found";
  } catch (const ConstructionError& e) {
    rep.strict_interior = false;
    rep.interior_note = e.what();
  }

  // (c) well-posed subproblems: compact X, or closed kernel domain plus the
  // supercoercivity table for the chosen surrogate
  if (set.compact()) {
    rep.well_posed = true;
    rep.well_posed_note = "constraint set is compact";
  } else if (!k.domain_closed()) {
    rep.well_posed = false;
    rep.well_posed_note =
        "open kernel domain with unbounded constraint set; update subproblems "
        "may have no minimizer";
  } else {
    bool coercive = k.supercoercive();
    bool needs_convex = problem.surrogate != SurrogateKind::Linear;
    rep.well_posed = coercive && (!needs_convex || problem.f.convex);
    if (rep.well_posed)
      rep.well_posed_note = "kernel supercoercive on the unbounded set";
    else if (!coercive)
      rep.well_posed_note =
          "kernel not supercoercive and constraint set unbounded";
    else
      rep.well_posed_note =
          "surrogate needs a convex objective on unbounded sets";
  }
  return rep;
}

ResidualResult subdifferential_residual(const ProblemInstance& problem,
                                        const Eigen::VectorXd& x) {
  if (x.size() != problem.dim())
    throw DimensionError("subdifferential_residual: dimension mismatch");
  if (!problem.set.contains(x, 1e-8))
    throw DomainError("subdifferential_residual: x not in the constraint set");
  Eigen::VectorXd g = problem.f.grad(x);
  ResidualResult out;

  if (problem.set.kind() == ConstraintSet::Kind::Box) {
    // closed-form distance to the normal cone of the box
    const auto& lo = problem.set.lower();
    const auto& hi = problem.set.upper();
    out.witness = Eigen::VectorXd(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      bool at_lo = std::isfinite(lo[i]) &&
                   std::abs(x[i] - lo[i]) <= kBoundaryTol * std::max(1.0, std::abs(lo[i]));
      bool at_hi = std::isfinite(hi[i]) &&
                   std::abs(x[i] - hi[i]) <= kBoundaryTol * std::max(1.0, std::abs(hi[i]));
      double p = g[i];
      if (at_lo && at_hi) p = 0.0;           // pinned coordinate
      else if (at_lo) p = std::min(g[i], 0.0);
      else if (at_hi) p = std::max(g[i], 0.0);
      out.witness[i] = p;
    }
    out.residual = out.witness.norm();
    out.multipliers = Eigen::VectorXd(0);
    return out;
  }

  // polytope / simplex:  min_{mu, lambda_B >= 0} || g + A^T mu - E_B lambda ||
  const Eigen::MatrixXd& A = problem.set.A();
  const int m = static_cast<int>(A.rows());
  std::vector<int> active;
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (x[i] <= kBoundaryTol) active.push_back(static_cast<int>(i));

  Eigen::MatrixXd M(x.size(), m + static_cast<int>(active.size()));
  M.leftCols(m) = A.transpose();
  for (std::size_t j = 0; j < active.size(); ++j) {
    M.col(m + static_cast<Eigen::Index>(j)).setZero();
    M(active[j], m + static_cast<Eigen::Index>(j)) = -1.0;
  }
  auto res = nnls(M, -g, m, 50 * (m + problem.dim() + static_cast<int>(active.size())));
  out.witness = res.residual_vector;  // = g + A^T mu - E_B lambda
  out.residual = res.residual;
  out.multipliers = res.z.head(m);
  return out;
}

ProblemInstance builtin(const std::string& name) {
  auto colon = name.find(':');
  std::string head = name.substr(0, colon);
  double alpha = 1.0;
  if (colon != std::string::npos) {
    try {
      alpha = std::stod(name.substr(colon + 1));
    } catch (const std::exception&) {
      throw UnknownInstanceError("bad instance parameter: " + name);
    }
  }

  if (head == "lp_simplex" || head == "entropy_trap" || head == "poly_trap") {
    SmoothObjective f;
    f.label = "-x1";
    f.value = [](const Eigen::VectorXd& x) { return -x[0]; };
    f.grad = [](const Eigen::VectorXd& x) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(x.size());
      g[0] = -1.0;
      return g;
    };
    f.hessian_diag = [](const Eigen::VectorXd& x) {
      return Eigen::VectorXd::Zero(x.size()).eval();
    };
    f.convex = true;
    f.affine = true;
    KernelSpec k = head == "poly_trap" ? KernelSpec::polynomial(alpha)
                                       : KernelSpec::shannon();
    return ProblemInstance(std::move(f), ConstraintSet::simplex(2), k,
                           SurrogateKind::Linear, 1.0);
  }
  if (head == "nonconvex_simplex") {
    SmoothObjective f;
    f.label = "-x1^2 + x2";
    f.value = [](const Eigen::VectorXd& x) { return -x[0] * x[0] + x[1]; };
    f.grad = [](const Eigen::VectorXd& x) {
      Eigen::VectorXd g(2);
      g << -2.0 * x[0], 1.0;
      return g;
    };
    f.hessian_diag = [](const Eigen::VectorXd&) {
      Eigen::VectorXd h(2);
      h << -2.0, 0.0;
      return h;
    };
    return ProblemInstance(std::move(f), ConstraintSet::simplex(2),
                           KernelSpec::shannon(), SurrogateKind::Linear, 1.0);
  }
  if (head == "illposed_inverse") {
    SmoothObjective f;
    f.label = "(x-3)^2";
    f.value = [](const Eigen::VectorXd& x) {
      return (x[0] - 3.0) * (x[0] - 3.0);
    };
    f.grad = [](const Eigen::VectorXd& x) {
      Eigen::VectorXd g(1);
      g << 2.0 * (x[0] - 3.0);
      return g;
    };
    f.hessian_diag = [](const Eigen::VectorXd&) {
      return Eigen::VectorXd::Constant(1, 2.0).eval();
    };
    f.convex = true;
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd hi =
        Eigen::VectorXd::Constant(1, std::numeric_limits<double>::infinity());
    return ProblemInstance(std::move(f), ConstraintSet::box(lo, hi),
                           KernelSpec::polynomial(1.0), SurrogateKind::Linear,
                           1.0);
  }
  throw UnknownInstanceError("unknown builtin instance: " + name);
}

}  // namespace bregman
