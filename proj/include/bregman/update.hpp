#pragma once

#include <Eigen/Dense>

#include "bregman/problem.hpp"

namespace bregman {

enum class UpdateStatus { Ok, Unbounded, MaxIter };

struct UpdateResult {
  Eigen::VectorXd y;        // minimizer (valid only when status == Ok)
  Eigen::VectorXd dual_mu;  // equality multipliers (empty for boxes)
  UpdateStatus status = UpdateStatus::Ok;
  int inner_iters = 0;
};

struct UpdateOptions {
  // Skip the Shannon/simplex/linear closed form and force the dual
  // root-finding path; used to cross-check the two routes.
  bool force_generic = false;
};

/// One Bregman proximal step from a strictly interior point:
///   argmin_y  gamma(y; x) + delta_X(y) + (1/t) D_h(y, x).
/// Supported: any kernel x {Simplex, single-row Polytope, Box} x {Linear,
/// QuadraticDiag}, plus FullObjective for affine objectives. Status
/// Unbounded signals an update subproblem without a minimizer.
UpdateResult bregman_update(const ProblemInstance& problem,
                            const Eigen::VectorXd& x, double t,
                            const UpdateOptions& opts = {});

/// Extended step defined on all of X: boundary coordinates of x are frozen,
/// interior coordinates minimize the reduced subproblem with the frozen
/// values folded into the constraint. Coincides with bregman_update (same
/// code path) when every coordinate is interior. Multi-row polytopes are
/// handled only when the frozen reduction pins a unique feasible point.
UpdateResult extended_update(const ProblemInstance& problem,
                             const Eigen::VectorXd& x, double t,
                             const UpdateOptions& opts = {});

/// Exponentiated-gradient step in log coordinates for the Shannon kernel on
/// the simplex with a linear surrogate; supports iterates far below the
/// double underflow threshold. Returns normalized log(y).
Eigen::VectorXd eg_step_log(const Eigen::VectorXd& log_x,
                            const Eigen::VectorXd& grad, double t);

}  // namespace bregman
