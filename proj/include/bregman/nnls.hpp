#pragma once

#include <Eigen/Dense>

namespace bregman {

struct NnlsResult {
  Eigen::VectorXd z;               // solution, sign-constrained tail included
  Eigen::VectorXd residual_vector; // M z - d
  double residual = 0.0;           // ||M z - d||_2
  int iterations = 0;
};

/// Lawson-Hanson active-set solve of  min ||M z - d||_2  subject to
/// z_i >= 0 for i >= n_free; the first n_free variables are unconstrained
/// and stay in the passive set throughout. Dense, desk scale.
///
/// max_iter < 0 selects the default cap 50 * (rows + cols).
/// Throws SolverError when the cap is exceeded.
NnlsResult nnls(const Eigen::MatrixXd& M, const Eigen::VectorXd& d,
                int n_free = 0, int max_iter = -1, double tol = 1e-10);

}  // namespace bregman
