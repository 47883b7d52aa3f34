#include "bregman/nnls.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "bregman/errors.hpp"

namespace bregman {

namespace {

Eigen::VectorXd solve_passive(const Eigen::MatrixXd& M,
                              const Eigen::VectorXd& d,
                              const std::vector<int>& passive) {
  Eigen::MatrixXd Mp(M.rows(), static_cast<Eigen::Index>(passive.size()));
  for (std::size_t j = 0; j < passive.size(); ++j)
    Mp.col(static_cast<Eigen::Index>(j)) = M.col(passive[j]);
  return Mp.colPivHouseholderQr().solve(d);
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& M, const Eigen::VectorXd& d, int n_free,
                int max_iter, double tol) {
  const int n = static_cast<int>(M.cols());
  const int m = static_cast<int>(M.rows());
  if (d.size() != m) throw DimensionError("nnls: rhs size mismatch");
  if (n_free < 0 || n_free > n) throw DimensionError("nnls: bad n_free");
  if (max_iter < 0) max_iter = 50 * (m + n);

  NnlsResult out;
  out.z = Eigen::VectorXd::Zero(n);

  std::vector<int> passive;
  std::vector<bool> in_passive(static_cast<std::size_t>(n), false);
  for (int j = 0; j < n_free; ++j) {
    passive.push_back(j);
    in_passive[static_cast<std::size_t>(j)] = true;
  }
  if (!passive.empty()) {
    Eigen::VectorXd zp = solve_passive(M, d, passive);
    for (std::size_t j = 0; j < passive.size(); ++j)
      out.z[passive[j]] = zp[static_cast<Eigen::Index>(j)];
  }

  const double dual_scale =
      std::max(1.0, (M.transpose() * d).cwiseAbs().maxCoeff());
  int iters = 0;
  while (true) {
    Eigen::VectorXd r = d - M * out.z;
    // dual variables on the constrained active columns
    int best = -1;
    double best_w = tol * dual_scale;
    for (int j = n_free; j < n; ++j) {
      if (in_passive[static_cast<std::size_t>(j)]) continue;
      double w = M.col(j).dot(r);
      if (w > best_w) {
        best_w = w;
        best = j;
      }
    }
    if (best < 0) break;  // KKT satisfied
    passive.push_back(best);
    in_passive[static_cast<std::size_t>(best)] = true;

    // inner loop: restore feasibility of the passive solve
    while (true) {
      if (++iters > max_iter)
        throw SolverError("nnls: iteration cap exceeded");
      Eigen::VectorXd zp = solve_passive(M, d, passive);
      bool feasible = true;
      double alpha = 1.0;
      for (std::size_t j = 0; j < passive.size(); ++j) {
        int col = passive[j];
        double v = zp[static_cast<Eigen::Index>(j)];
        if (col >= n_free && v <= 0.0) {
          feasible = false;
          double zj = out.z[col];
          double step = zj / (zj - v);
          alpha = std::min(alpha, step);
        }
      }
      if (feasible) {
        out.z.setZero();
        for (std::size_t j = 0; j < passive.size(); ++j)
          out.z[passive[j]] = zp[static_cast<Eigen::Index>(j)];
        break;
      }
      for (std::size_t j = 0; j < passive.size(); ++j)
        out.z[passive[j]] +=
            alpha * (zp[static_cast<Eigen::Index>(j)] - out.z[passive[j]]);
      // drop constrained variables that hit zero
      std::vector<int> kept;
      for (int col : passive) {
        if (col >= n_free && out.z[col] <= 1e-14 * dual_scale) {
          out.z[col] = 0.0;
          in_passive[static_cast<std::size_t>(col)] = false;
        } else {
          kept.push_back(col);
        }
      }
      passive.swap(kept);
    }
  }

  out.residual_vector = M * out.z - d;
  out.residual = out.residual_vector.norm();
  out.iterations = iters;
  return out;
}

}  // namespace bregman
