#include "bregman/partition.hpp"

#include <cmath>
#include <sstream>

namespace bregman {

namespace {
bool near_endpoint(double v, double e, double tol) {
  if (!std::isfinite(e)) return false;
  return std::abs(v - e) <= tol * std::max(1.0, std::abs(e));
}
}  // namespace

CoordinatePartition classify(const Eigen::VectorXd& x, const KernelSpec& kernel,
                             double tol) {
  CoordinatePartition part;
  part.tol = tol;
  part.on_boundary.assign(static_cast<std::size_t>(x.size()), false);
  const double a = kernel.left(), c = kernel.right();
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double v = x[i];
    bool lo = near_endpoint(v, a, tol);
    bool hi = near_endpoint(v, c, tol);
    if (!lo && !hi && (v < a || v > c)) {
      std::ostringstream os;
      os << "classify: coordinate " << i << " = " << v
         << " outside cl(dom) of " << kernel.tag();
      throw DomainError(os.str());
    }
    if (lo || hi) {
      part.boundary.push_back(static_cast<int>(i));
      part.on_boundary[static_cast<std::size_t>(i)] = true;
    } else {
      part.interior.push_back(static_cast<int>(i));
    }
  }
  return part;
}

}  // namespace bregman
