#pragma once

#include <Eigen/Dense>
#include <string>

#include "bregman/errors.hpp"

namespace bregman {

enum class KernelFamily {
  Shannon,          // x log x on [0, inf)
  FermiDirac,       // x log x + (1-x) log(1-x) on [0, 1]
  Burg,             // -log x on (0, inf)
  FractionalPower,  // p x - x^p / (1-p),  p in (0,1), on [0, inf)
  Hellinger,        // -sqrt(1 - x^2) on [-1, 1]
  Polynomial,       // x^-alpha / alpha,  alpha > 0, on (0, inf)
  Euclidean,        // x^2 / 2 on R; gradient-Lipschitz baseline, not Legendre
};

/// Univariate kernel phi of a separable Bregman kernel h(x) = sum_i phi(x_i).
/// Immutable value type; all members are pure and thread-safe.
class KernelSpec {
 public:
  static KernelSpec shannon();
  static KernelSpec fermi_dirac();
  static KernelSpec burg();
  static KernelSpec fractional_power(double p);
  static KernelSpec hellinger();
  static KernelSpec polynomial(double alpha);
  static KernelSpec euclidean();

  // Tag grammar: "shannon", "fermi", "burg", "fracpow:<p>", "hellinger",
  // "poly:<alpha>", "euclid".
  static KernelSpec parse(const std::string& tag);
  std::string tag() const;

  KernelFamily family() const { return family_; }
  double param() const { return param_; }

  double left() const { return a_; }   // left endpoint of cl(dom(phi))
  double right() const { return c_; }  // right endpoint of cl(dom(phi))

  // False only for the Euclidean baseline, whose gradient stays bounded at
  // every finite point; coordinate classification is then vacuous.
  bool legendre() const { return family_ != KernelFamily::Euclidean; }

  // phi finite at its finite endpoints (Burg and Polynomial are open at 0).
  bool domain_closed() const;

  // phi(x)/|x| -> inf along the unbounded side of the domain. Kernels with a
  // bounded domain count as supercoercive (they are +inf off a compact set).
  bool supercoercive() const;

  // Supremum of the range of phi'; finite for Burg (0), Polynomial (0) and
  // FractionalPower (p). The infimum is -inf for every family.
  double slope_sup() const;

  bool in_closure(double x, double tol = 0.0) const;
  bool in_interior(double x) const;

  // Kernel value on cl(dom(phi)); +inf at an endpoint where phi blows up,
  // DomainError outside the closure.
  double phi(double x) const;

  // phi' on int(dom(phi)); DomainError at or beyond the boundary.
  double phi_prime(double x) const;

  // phi'' on int(dom(phi)); used by Newton polishing of dual roots.
  double phi_second(double x) const;

  // Inverse of phi'; closed form for every family. RangeError when s is not
  // in the open range of phi'.
  double phi_prime_inv(double s) const;

  // Scalar Bregman divergence D_phi(y, x) for y in cl(dom), x interior.
  double bregman(double y, double x) const;

  bool operator==(const KernelSpec& o) const {
    return family_ == o.family_ && param_ == o.param_;
  }

 private:
  KernelSpec(KernelFamily f, double param, double a, double c)
      : family_(f), param_(param), a_(a), c_(c) {}

  KernelFamily family_;
  double param_;
  double a_;
  double c_;
};

/// Separable divergence D_h(y, x) = sum_i D_phi(y_i, x_i).
double bregman_vec(const KernelSpec& kernel, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& x);

}  // namespace bregman
