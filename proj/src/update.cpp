#include "bregman/update.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace bregman {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMuCap = 1e8;      // dual magnitude before declaring unbounded
constexpr double kDualTol = 1e-12;  // equality residual target, scaled by |b|
constexpr int kDualMaxIter = 300;
constexpr int kOuterCap = 100;      // quadratic surrogate fixed point
constexpr double kOuterTol = 1e-11;

struct Reduction {
  std::vector<int> free_idx;  // coordinates being optimized
  Eigen::VectorXd y;          // full-size output, frozen coords pre-filled
  double rhs = 0.0;           // reduced equality right-hand side
  Eigen::VectorXd a;          // equality weights on the free coordinates
};

// Per-coordinate minimizer for dual target s = phi'(x_i) - t c_i - t a_i mu.
// Clips at zero when dom(phi) extends below the polytope bound x >= 0.
// +inf when s is at or past the slope supremum.
double coord_value(const KernelSpec& k, double s, bool clip_at_zero) {
  if (!(s < k.slope_sup())) return kInf;
  double y = k.phi_prime_inv(s);
  if (clip_at_zero && y < 0.0) y = 0.0;
  return y;
}

// Scalar-dual solve of
//   min sum_{i in F} [c_i y_i + (1/t) D_phi(y_i, x_i)]  s.t.  a^T y_F = rhs,
// with y >= 0 where the kernel domain allows negatives. The dual residual
// r(mu) = a^T y(mu) - rhs is continuous and nonincreasing; the bracket grows
// geometrically from an interior seed and the root is polished by Newton.
UpdateResult solve_equality(const KernelSpec& k, const Eigen::VectorXd& x,
                            const Eigen::VectorXd& c, double t,
                            const Reduction& red) {
  UpdateResult out;
  out.y = red.y;
  const auto& F = red.free_idx;
  const int nf = static_cast<int>(F.size());
  const bool clip = k.left() < 0.0;
  const double U = k.slope_sup();
  const double rscale = std::max(1.0, std::abs(red.rhs));

  std::vector<double> base(static_cast<std::size_t>(nf));
  for (int j = 0; j < nf; ++j)
    base[static_cast<std::size_t>(j)] =
        k.phi_prime(x[F[static_cast<std::size_t>(j)]]) -
        t * c[F[static_cast<std::size_t>(j)]];

  // dual targets must satisfy s_i(mu) < U; zero-weight coordinates are
  // uncoupled and can make the whole subproblem unbounded on their own
  double mu_lo = -kInf, mu_hi = kInf;
  for (int j = 0; j < nf; ++j) {
    double aj = red.a[j];
    double bj = base[static_cast<std::size_t>(j)];
    if (aj == 0.0) {
      if (!(bj < U) && !std::isfinite(k.right())) {
        out.status = UpdateStatus::Unbounded;
        return out;
      }
      continue;
    }
    if (std::isfinite(U)) {
      double theta = (bj - U) / (t * aj);
      if (aj > 0.0) mu_lo = std::max(mu_lo, theta);
      else mu_hi = std::min(mu_hi, theta);
    }
  }
  if (mu_lo >= mu_hi) {
    out.status = UpdateStatus::Unbounded;
    return out;
  }

  Eigen::VectorXd yf(nf);
  auto eval_y = [&](double mu) -> bool {
    bool finite = true;
    for (int j = 0; j < nf; ++j) {
      double s = base[static_cast<std::size_t>(j)] - t * red.a[j] * mu;
      yf[j] = coord_value(k, s, clip);
      if (!std::isfinite(yf[j])) finite = false;
    }
    return finite;
  };
  auto residual = [&](double mu) -> double {
    if (!eval_y(mu)) {
      double sgn = 0.0;
      for (int j = 0; j < nf; ++j)
        if (!std::isfinite(yf[j]))
          sgn += red.a[j] > 0 ? 1.0 : (red.a[j] < 0 ? -1.0 : 0.0);
      return sgn >= 0.0 ? kInf : -kInf;
    }
    double s = 0.0;
    for (int j = 0; j < nf; ++j) s += red.a[j] * yf[j];
    return s - red.rhs;
  };

  double seed;
  if (std::isfinite(mu_lo) && std::isfinite(mu_hi)) seed = 0.5 * (mu_lo + mu_hi);
  else if (std::isfinite(mu_lo)) seed = std::max(0.0, mu_lo + 1.0);
  else if (std::isfinite(mu_hi)) seed = std::min(0.0, mu_hi - 1.0);
  else seed = 0.0;

  int iters = 1;
  double lo = seed, hi = seed;
  double rlo = residual(seed), rhi = rlo;
  double step = 1.0;
  while (rhi > 0.0) {  // expand right until r changes sign
    lo = hi;
    rlo = rhi;
    if (std::isfinite(mu_hi)) hi = mu_hi - 0.5 * (mu_hi - hi);
    else { hi += step; step *= 2.0; }
    bool exhausted =
        std::abs(hi) > kMuCap ||
        (std::isfinite(mu_hi) &&
         mu_hi - hi < 1e-14 * std::max(1.0, std::abs(mu_hi)));
    if (++iters > kDualMaxIter || exhausted) {
      out.status = UpdateStatus::Unbounded;
      out.inner_iters = iters;
      return out;
    }
    rhi = residual(hi);
  }
  while (rlo < 0.0) {  // expand left
    hi = lo;
    rhi = rlo;
    if (std::isfinite(mu_lo)) lo = mu_lo + 0.5 * (lo - mu_lo);
    else { lo -= step; step *= 2.0; }
    bool exhausted =
        std::abs(lo) > kMuCap ||
        (std::isfinite(mu_lo) &&
         lo - mu_lo < 1e-14 * std::max(1.0, std::abs(mu_lo)));
    if (++iters > kDualMaxIter || exhausted) {
      out.status = UpdateStatus::Unbounded;
      out.inner_iters = iters;
      return out;
    }
    rlo = residual(lo);
  }

  // bisection with safeguarded Newton; a few extra polish steps after the
  // residual target is met keep the oracle-agreement tolerances comfortable
  double mu = 0.5 * (lo + hi);
  double r = residual(mu);
  ++iters;
  int polish = 0;
  while (iters < kDualMaxIter) {
    if (r > 0.0) lo = mu;
    else hi = mu;
    if (std::abs(r) <= kDualTol * rscale && ++polish >= 3) break;
    double drdmu = 0.0;
    if (eval_y(mu)) {
      for (int j = 0; j < nf; ++j) {
        if (clip && yf[j] == 0.0) continue;
        if (yf[j] > k.left() && yf[j] < k.right())
          drdmu -= t * red.a[j] * red.a[j] / k.phi_second(yf[j]);
      }
    }
    double cand = drdmu < 0.0 ? mu - r / drdmu : 0.5 * (lo + hi);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    if (cand == mu) break;
    mu = cand;
    r = residual(mu);
    ++iters;
  }
  if (std::abs(r) > 1e-8 * rscale)
    throw SolverError("dual root-finding did not converge");

  eval_y(mu);
  for (int j = 0; j < nf; ++j) out.y[F[static_cast<std::size_t>(j)]] = yf[j];
  out.dual_mu = Eigen::VectorXd::Constant(1, mu);
  out.status = UpdateStatus::Ok;
  out.inner_iters = iters;
  return out;
}

// Per-coordinate solve on a box; no coupling, no dual variable.
UpdateResult solve_box(const KernelSpec& k, const ConstraintSet& set,
                       const Eigen::VectorXd& x, const Eigen::VectorXd& c,
                       double t, const Reduction& red) {
  UpdateResult out;
  out.y = red.y;
  out.dual_mu = Eigen::VectorXd(0);
  for (int i : red.free_idx) {
    double s = k.phi_prime(x[i]) - t * c[i];
    double lo = set.lower()[i], hi = set.upper()[i];
    double v;
    if (s < k.slope_sup()) {
      v = k.phi_prime_inv(s);
    } else if (std::isfinite(hi) && hi < k.right()) {
      v = hi;  // objective still decreasing at the box edge
    } else {
      out.status = UpdateStatus::Unbounded;
      return out;
    }
    // clip only where the bound is interior to dom(phi)
    if (v < lo && lo > k.left()) v = lo;
    if (v > hi && hi < k.right()) v = hi;
    out.y[i] = v;
  }
  out.status = UpdateStatus::Ok;
  return out;
}

// Shannon/simplex closed form on the free coordinates: y ~ x exp(-t c),
// scaled to sum to rhs.
UpdateResult solve_shannon_simplex(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& c, double t,
                                   const Reduction& red) {
  UpdateResult out;
  out.y = red.y;
  const auto& F = red.free_idx;
  double mx = -kInf;
  std::vector<double> logw(F.size());
  for (std::size_t j = 0; j < F.size(); ++j) {
    logw[j] = std::log(x[F[j]]) - t * c[F[j]];
    mx = std::max(mx, logw[j]);
  }
  double sum = 0.0;
  for (double lw : logw) sum += std::exp(lw - mx);
  double logS = mx + std::log(sum);
  for (std::size_t j = 0; j < F.size(); ++j)
    out.y[F[j]] = red.rhs * std::exp(logw[j] - logS);
  // phi'(y_i) = phi'(x_i) - t c_i - t mu  =>  mu = (logS - log rhs) / t
  out.dual_mu = Eigen::VectorXd::Constant(1, (logS - std::log(red.rhs)) / t);
  out.status = UpdateStatus::Ok;
  out.inner_iters = 1;
  return out;
}

UpdateResult solve_linear_costs(const ProblemInstance& p,
                                const Eigen::VectorXd& x,
                                const Eigen::VectorXd& c, double t,
                                const Reduction& red,
                                const UpdateOptions& opts) {
  if (p.set.kind() == ConstraintSet::Kind::Box)
    return solve_box(p.kernel, p.set, x, c, t, red);
  if (!opts.force_generic && p.kernel.family() == KernelFamily::Shannon &&
      p.set.kind() == ConstraintSet::Kind::Simplex)
    return solve_shannon_simplex(x, c, t, red);
  return solve_equality(p.kernel, x, c, t, red);
}

UpdateResult fixed_point_result(const Eigen::VectorXd& x, int m) {
  UpdateResult out;
  out.y = x;
  out.dual_mu = Eigen::VectorXd::Zero(m);
  out.status = UpdateStatus::Ok;
  return out;
}

UpdateResult solve_core(const ProblemInstance& p, const Eigen::VectorXd& x,
                        double t, const CoordinatePartition& part,
                        const UpdateOptions& opts) {
  Reduction red;
  red.y = x;
  red.free_idx = part.interior;
  const bool equality = p.set.kind() != ConstraintSet::Kind::Box;

  if (part.interior.empty())
    return fixed_point_result(x, equality ? p.set.rows() : 0);

  if (equality) {
    const Eigen::MatrixXd& A = p.set.A();
    const int m = p.set.rows();
    const int ni = static_cast<int>(part.interior.size());

    Eigen::VectorXd rhs_vec = p.set.b();
    for (int b : part.boundary) rhs_vec -= A.col(b) * x[b];

    if (ni <= m) {
      // frozen coordinates may pin the free block to a single point
      Eigen::MatrixXd AI(m, ni);
      for (int j = 0; j < ni; ++j)
        AI.col(j) = A.col(part.interior[static_cast<std::size_t>(j)]);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(AI);
      if (lu.rank() == ni) {
        Eigen::VectorXd xi(ni);
        for (int j = 0; j < ni; ++j)
          xi[j] = x[part.interior[static_cast<std::size_t>(j)]];
        double scale = std::max(1.0, rhs_vec.cwiseAbs().maxCoeff());
        if ((AI * xi - rhs_vec).cwiseAbs().maxCoeff() > 1e-8 * scale)
          throw DegenerateReductionError(
              "frozen boundary coordinates leave an empty reduced set");
        return fixed_point_result(x, m);
      }
    }
    if (m >= 2)
      throw UnsupportedCombinationError(
          "multi-row polytopes are supported only where the frozen reduction "
          "pins a unique feasible point");

    red.rhs = rhs_vec[0];
    red.a = Eigen::VectorXd(ni);
    for (int j = 0; j < ni; ++j)
      red.a[j] = A(0, part.interior[static_cast<std::size_t>(j)]);
    if ((red.a.array() > 0.0).all() && red.rhs <= 0.0) {
      if (red.rhs < -1e-12)
        throw DegenerateReductionError(
            "frozen boundary coordinates leave an empty reduced set");
      return fixed_point_result(x, 1);  // y_I pinned at zero = x_I
    }
  }

  Eigen::VectorXd grad = p.f.grad(x);
  if (grad.size() != x.size())
    throw DimensionError("gradient oracle size mismatch");

  switch (p.surrogate) {
    case SurrogateKind::FullObjective:
      if (!p.f.affine)
        throw UnsupportedCombinationError(
            "full-objective surrogate supported only for affine objectives");
      [[fallthrough]];
    case SurrogateKind::Linear:
      return solve_linear_costs(p, x, grad, t, red, opts);
    case SurrogateKind::QuadraticDiag: {
      if (!p.f.hessian_diag)
        throw UnsupportedCombinationError(
            "quadratic surrogate needs a Hessian diagonal oracle");
      Eigen::VectorXd D = p.f.hessian_diag(x);
      // frozen-curvature fixed point keeps the subproblem separable
      Eigen::VectorXd y = x;
      int total = 0;
      for (int outer = 0; outer < kOuterCap; ++outer) {
        Eigen::VectorXd c = grad + D.cwiseProduct(y - x);
        UpdateResult res = solve_linear_costs(p, x, c, t, red, opts);
        total += res.inner_iters + 1;
        if (res.status != UpdateStatus::Ok) {
          res.inner_iters = total;
          return res;
        }
        double delta = (res.y - y).cwiseAbs().maxCoeff();
        y = res.y;
        if (delta <= kOuterTol) {
          res.inner_iters = total;
          return res;
        }
      }
      UpdateResult out;
      out.y = y;
      out.status = UpdateStatus::MaxIter;
      out.inner_iters = total;
      return out;
    }
  }
  throw UnsupportedCombinationError("unreachable surrogate kind");
}

void check_step(const ProblemInstance& p, double t) {
  if (!(t > 0.0) || t > p.t_bar * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "step size t=" << t << " outside (0, " << p.t_bar << "]";
    throw DomainError(os.str());
  }
}

}  // namespace

UpdateResult bregman_update(const ProblemInstance& problem,
                            const Eigen::VectorXd& x, double t,
                            const UpdateOptions& opts) {
  check_step(problem, t);
  if (x.size() != problem.dim())
    throw DimensionError("bregman_update: dimension mismatch");
  // exact interiority, not the classification tolerance: iterates may sit
  // exponentially close to the boundary and still take plain steps
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!problem.kernel.in_interior(x[i]))
      throw DomainError("bregman_update: x must be strictly interior to dom(h)");
  CoordinatePartition part;
  part.tol = 0.0;
  part.on_boundary.assign(static_cast<std::size_t>(x.size()), false);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    part.interior.push_back(static_cast<int>(i));
  return solve_core(problem, x, t, part, opts);
}

UpdateResult extended_update(const ProblemInstance& problem,
                             const Eigen::VectorXd& x, double t,
                             const UpdateOptions& opts) {
  check_step(problem, t);
  if (x.size() != problem.dim())
    throw DimensionError("extended_update: dimension mismatch");
  if (!problem.set.contains(x, 1e-8))
    throw DomainError("extended_update: x not in the constraint set");
  CoordinatePartition part = classify(x, problem.kernel);
  return solve_core(problem, x, t, part, opts);
}

Eigen::VectorXd eg_step_log(const Eigen::VectorXd& log_x,
                            const Eigen::VectorXd& grad, double t) {
  if (log_x.size() != grad.size())
    throw DimensionError("eg_step_log: size mismatch");
  Eigen::VectorXd l = log_x - t * grad;
  double mx = l.maxCoeff();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < l.size(); ++i) sum += std::exp(l[i] - mx);
  return (l.array() - (mx + std::log(sum))).matrix();
}

}  // namespace bregman
