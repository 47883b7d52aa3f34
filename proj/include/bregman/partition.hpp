#pragma once

#include <Eigen/Dense>
#include <vector>

#include "bregman/kernel.hpp"

namespace bregman {

// Default boundary classification tolerance, relative to the endpoint scale.
inline constexpr double kBoundaryTol = 1e-12;

/// Index partition of a point into kernel-interior and kernel-boundary
/// coordinates. A coordinate is boundary when it sits within tol (scaled by
/// max(1, |endpoint|)) of a finite endpoint of cl(dom(phi)).
struct CoordinatePartition {
  std::vector<int> interior;
  std::vector<int> boundary;
  std::vector<bool> on_boundary;  // size n mask
  double tol = kBoundaryTol;

  bool all_interior() const { return boundary.empty(); }
};

CoordinatePartition classify(const Eigen::VectorXd& x, const KernelSpec& kernel,
                             double tol = kBoundaryTol);

}  // namespace bregman
