#pragma once

#include <Eigen/Dense>

#include "bregman/driver.hpp"
#include "bregman/problem.hpp"

namespace bregman {

/// Finite-step trap experiment around the spurious point (0, 1) of the
/// two-coordinate linear instance, with either the Shannon or the
/// polynomial kernel.
struct TrapConfig {
  enum class Instance { Entropy, Poly };
  Instance instance = Instance::Entropy;
  double eps = 0.1;    // trap radius, in (0, 1)
  double t = 1.0;      // constant step size
  int K = 120;         // horizon
  double alpha = 1.0;  // polynomial kernel exponent
  Eigen::VectorXd spurious_point;  // defaults to (0, 1)
  Eigen::VectorXd x0_override;     // replaces the pinned initial point
  bool log_domain = false;
  bool force_generic = false;

  Eigen::VectorXd target() const;
  void validate() const;
};

/// x0 = (sqrt(2) eps/2 e^{-tK}, 1 - .), strictly interior to the simplex.
/// UnderflowError when e^{-tK} is subnormal in this linear representation;
/// init_entropy_trap_log covers that regime.
Eigen::VectorXd init_entropy_trap(const TrapConfig& cfg);

/// Same initial point as componentwise logs, exact for any tK.
Eigen::VectorXd init_entropy_trap_log(const TrapConfig& cfg);

/// x0_1 = min{ (2/(tK + eps^{-(alpha+1)}))^{1/(alpha+1)},
///             2^{alpha+1}/(1 + 2^{alpha+1}) },  x0_2 = 1 - x0_1.
Eigen::VectorXd init_poly_trap(const TrapConfig& cfg);

/// Exact exponentiated-gradient step for the entropy instance; serves as an
/// oracle against the generic dual solver. Output sums to one up to 1 ulp.
Eigen::Vector2d closed_form_eg_step(const Eigen::Vector2d& x, double t);

struct TrapResult {
  Trajectory trajectory;
  bool trapped = false;       // the instance's own criterion (see below)
  bool ball_trapped = false;  // ||x^k - x*|| <= eps for all k in [K]
  bool end_trapped = false;   // x1^K <= sqrt(2) eps (end-of-horizon bound)
};

/// Run K constant-step iterations from the matching initial point and
/// evaluate the trap criteria. `trapped` is the per-step ball condition for
/// the entropy instance and the end-of-horizon bound for the polynomial
/// instance; both raw verdicts are reported separately as well.
TrapResult run_trap(const TrapConfig& cfg);

/// Empirical trap construction: shrink x0 = x* + theta (ref - x*) along the
/// segment toward a strictly interior reference until all K iterates stay in
/// the eps-ball. Not tied to any closed-form initial point. SolverError when
/// theta underflows before a trap appears.
Eigen::VectorXd search_trap_start(const ProblemInstance& problem,
                                  const Eigen::VectorXd& spurious,
                                  const Eigen::VectorXd& interior_ref,
                                  double eps, double t, int K);

}  // namespace bregman
