#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "bregman/kernel.hpp"
#include "bregman/partition.hpp"

namespace bregman {

/// Smooth part f of F = f + delta_X, given through oracles. Oracles must be
/// pure functions of their input. The convexity and affinity flags are
/// caller-asserted; nothing verifies them.
struct SmoothObjective {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> hessian_diag;  // optional
  std::string label;
  bool convex = false;
  bool affine = false;
};

/// Max relative mismatch between grad and a central difference of value over
/// the given points. Test / diagnostics helper.
double gradient_check(const SmoothObjective& f,
                      const std::vector<Eigen::VectorXd>& points,
                      double step = 1e-6);

class ConstraintSet {
 public:
  enum class Kind { Simplex, Polytope, Box };

  static ConstraintSet simplex(int n);
  // {x : A x = b, x >= 0}; requires a strictly positive feasible point.
  static ConstraintSet polytope(Eigen::MatrixXd A, Eigen::VectorXd b);
  static ConstraintSet box(Eigen::VectorXd lower, Eigen::VectorXd upper);

  Kind kind() const { return kind_; }
  int dim() const { return n_; }
  int rows() const { return static_cast<int>(A_.rows()); }  // 0 for boxes

  // Equality data; the simplex materializes (1^T, 1).
  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::VectorXd& b() const { return b_; }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }

  bool contains(const Eigen::VectorXd& x, double tol = 1e-9) const;
  bool compact() const;

  // Vertex list for simplices and polytopes (exhaustive basis enumeration,
  // dedup at 1e-9) and corners for finite boxes. Throws TooLargeError past
  // max_bases candidates and NonCompactError for unbounded boxes.
  std::vector<Eigen::VectorXd> vertices(long max_bases = 1000000) const;

  // Point of X strictly inside int(dom(h)), or ConstructionError.
  Eigen::VectorXd strictly_feasible_point(const KernelSpec& kernel) const;

 private:
  ConstraintSet() = default;
  Kind kind_ = Kind::Simplex;
  int n_ = 0;
  Eigen::MatrixXd A_;
  Eigen::VectorXd b_;
  Eigen::VectorXd lower_, upper_;
  Eigen::VectorXd positive_point_;  // polytope only
};

enum class SurrogateKind { Linear, QuadraticDiag, FullObjective };

SurrogateKind parse_surrogate(const std::string& name);
std::string surrogate_name(SurrogateKind s);

/// One problem of the form  min f(x) + delta_X(x)  paired with a kernel and
/// a surrogate choice. Immutable after construction; construction finds and
/// stores a strictly feasible interior point (ConstructionError otherwise).
struct ProblemInstance {
  ProblemInstance(SmoothObjective f_, ConstraintSet set_, KernelSpec kernel_,
                  SurrogateKind surrogate_, double t_bar_);

  SmoothObjective f;
  ConstraintSet set;
  KernelSpec kernel;
  SurrogateKind surrogate;
  double t_bar;
  Eigen::VectorXd x_interior;

  int dim() const { return set.dim(); }
  ProblemInstance with_kernel(const KernelSpec& k) const;
  ProblemInstance with_surrogate(SurrogateKind s) const;
};

/// Per-clause result of the blanket assumption checks:
///  domain_inclusion  - X sits inside cl(dom h) componentwise
///  strict_interior   - a strictly feasible interior point exists
///  well_posed        - update subproblems attain their minimum (X compact,
///                      or closed kernel domain plus a supercoercivity table
///                      entry for the chosen surrogate)
struct AssumptionReport {
  bool domain_inclusion = false;
  bool strict_interior = false;
  bool well_posed = false;
  std::string domain_note, interior_note, well_posed_note;
  Eigen::VectorXd interior_point;

  bool all_pass() const {
    return domain_inclusion && strict_interior && well_posed;
  }
};

AssumptionReport check_assumptions(const ProblemInstance& problem);

struct ResidualResult {
  double residual = 0.0;        // min ||grad f(x) + A^T mu - lambda||_2
  Eigen::VectorXd witness;      // minimizing subgradient p
  Eigen::VectorXd multipliers;  // mu (empty for boxes)
};

/// Euclidean distance from 0 to the subdifferential of f + delta_X at x;
/// zero exactly at stationary points. The active inequality set is taken
/// from the constraint (coordinates within kBoundaryTol of their bound).
ResidualResult subdifferential_residual(const ProblemInstance& problem,
                                        const Eigen::VectorXd& x);

/// Named instances:
///  lp_simplex         min -x1 on the 2-simplex, Shannon kernel
///  nonconvex_simplex  min -x1^2 + x2 on the 2-simplex, Shannon kernel
///  illposed_inverse   min (x-3)^2 over x >= 0 with kernel 1/x (poly:1)
///  entropy_trap       alias of lp_simplex
///  poly_trap          lp_simplex with kernel poly:alpha ("poly_trap:<a>")
ProblemInstance builtin(const std::string& name);

}  // namespace bregman
