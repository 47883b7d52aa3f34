#include "bregman/kernel.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace bregman {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void domain_fail(const KernelSpec& k, double x, const char* what) {
  std::ostringstream os;
  os << what << ": x=" << x << " outside " << k.tag() << " domain ["
     << k.left() << ", " << k.right() << "]";
  throw DomainError(os.str());
}
}  // namespace

KernelSpec KernelSpec::shannon() {
  return KernelSpec(KernelFamily::Shannon, 0.0, 0.0, kInf);
}
KernelSpec KernelSpec::fermi_dirac() {
  return KernelSpec(KernelFamily::FermiDirac, 0.0, 0.0, 1.0);
}
KernelSpec KernelSpec::burg() {
  return KernelSpec(KernelFamily::Burg, 0.0, 0.0, kInf);
}
KernelSpec KernelSpec::fractional_power(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ConstructionError("fractional power kernel needs p in (0,1)");
  return KernelSpec(KernelFamily::FractionalPower, p, 0.0, kInf);
}
KernelSpec KernelSpec::hellinger() {
  return KernelSpec(KernelFamily::Hellinger, 0.0, -1.0, 1.0);
}
KernelSpec KernelSpec::polynomial(double alpha) {
  if (!(alpha > 0.0))
    throw ConstructionError("polynomial kernel needs alpha > 0");
  return KernelSpec(KernelFamily::Polynomial, alpha, 0.0, kInf);
}
KernelSpec KernelSpec::euclidean() {
  return KernelSpec(KernelFamily::Euclidean, 0.0, -kInf, kInf);
}

KernelSpec KernelSpec::parse(const std::string& tag) {
  auto colon = tag.find(':');
  std::string head = tag.substr(0, colon);
  double value = 0.0;
  bool has_value = colon != std::string::npos;
  if (has_value) {
    try {
      std::size_t used = 0;
      value = std::stod(tag.substr(colon + 1), &used);
      if (used != tag.size() - colon - 1) throw std::invalid_argument(tag);
    } catch (const std::exception&) {
      throw ConstructionError("bad kernel tag parameter: " + tag);
    }
  }
  if (head == "shannon") return shannon();
  if (head == "fermi") return fermi_dirac();
  if (head == "burg") return burg();
  if (head == "hellinger") return hellinger();
  if (head == "euclid") return euclidean();
  if (head == "fracpow") {
    if (!has_value) throw ConstructionError("fracpow tag needs a parameter");
    return fractional_power(value);
  }
  if (head == "poly") {
    if (!has_value) throw ConstructionError("poly tag needs a parameter");
    return polynomial(value);
  }
  throw ConstructionError("unknown kernel tag: " + tag);
}

std::string KernelSpec::tag() const {
  std::ostringstream os;
  switch (family_) {
    case KernelFamily::Shannon: return "shannon";
    case KernelFamily::FermiDirac: return "fermi";
    case KernelFamily::Burg: return "burg";
    case KernelFamily::Hellinger: return "hellinger";
    case KernelFamily::Euclidean: return "euclid";
    case KernelFamily::FractionalPower:
      os << "fracpow:" << param_;
      return os.str();
    case KernelFamily::Polynomial:
      os << "poly:" << param_;
      return os.str();
  }
  return "?";
}

bool KernelSpec::domain_closed() const {
  return family_ != KernelFamily::Burg && family_ != KernelFamily::Polynomial;
}

bool KernelSpec::supercoercive() const {
  switch (family_) {
    case KernelFamily::Shannon:
    case KernelFamily::Euclidean:
    case KernelFamily::FermiDirac:  // bounded domain
    case KernelFamily::Hellinger:   // bounded domain
      return true;
    case KernelFamily::Burg:
    case KernelFamily::FractionalPower:  // grows like p*x
    case KernelFamily::Polynomial:
      return false;
  }
  return false;
}

double KernelSpec::slope_sup() const {
  switch (family_) {
    case KernelFamily::Burg:
    case KernelFamily::Polynomial:
      return 0.0;
    case KernelFamily::FractionalPower:
      return param_;
    default:
      return kInf;
  }
}

bool KernelSpec::in_closure(double x, double tol) const {
  return x >= a_ - tol && x <= c_ + tol;
}

bool KernelSpec::in_interior(double x) const { return x > a_ && x < c_; }

double KernelSpec::phi(double x) const {
  if (!in_closure(x)) domain_fail(*this, x, "phi");
  switch (family_) {
    case KernelFamily::Shannon:
      return x == 0.0 ? 0.0 : x * std::log(x);
    case KernelFamily::FermiDirac: {
      double s = 0.0;
      if (x > 0.0) s += x * std::log(x);
      if (x < 1.0) s += (1.0 - x) * std::log1p(-x);
      return s;
    }
    case KernelFamily::Burg:
      return x == 0.0 ? kInf : -std::log(x);
    case KernelFamily::FractionalPower:
      return param_ * x - std::pow(x, param_) / (1.0 - param_);
    case KernelFamily::Hellinger:
      return -std::sqrt((1.0 - x) * (1.0 + x));
    case KernelFamily::Polynomial:
      return x == 0.0 ? kInf : std::pow(x, -param_) / param_;
    case KernelFamily::Euclidean:
      return 0.5 * x * x;
  }
  return 0.0;
}

double KernelSpec::phi_prime(double x) const {
  if (!in_interior(x)) domain_fail(*this, x, "phi_prime");
  switch (family_) {
    case KernelFamily::Shannon:
      return std::log(x) + 1.0;
    case KernelFamily::FermiDirac:
      return std::log(x) - std::log1p(-x);
    case KernelFamily::Burg:
      return -1.0 / x;
    case KernelFamily::FractionalPower:
      return param_ - param_ / (1.0 - param_) * std::pow(x, param_ - 1.0);
    case KernelFamily::Hellinger:
      return x / std::sqrt((1.0 - x) * (1.0 + x));
    case KernelFamily::Polynomial:
      return -std::pow(x, -param_ - 1.0);
    case KernelFamily::Euclidean:
      return x;
  }
  return 0.0;
}

double KernelSpec::phi_second(double x) const {
  if (!in_interior(x)) domain_fail(*this, x, "phi_second");
  switch (family_) {
    case KernelFamily::Shannon:
      return 1.0 / x;
    case KernelFamily::FermiDirac:
      return 1.0 / (x * (1.0 - x));
    case KernelFamily::Burg:
      return 1.0 / (x * x);
    case KernelFamily::FractionalPower:
      return param_ * std::pow(x, param_ - 2.0);
    case KernelFamily::Hellinger:
      return std::pow((1.0 - x) * (1.0 + x), -1.5);
    case KernelFamily::Polynomial:
      return (param_ + 1.0) * std::pow(x, -param_ - 2.0);
    case KernelFamily::Euclidean:
      return 1.0;
  }
  return 0.0;
}

double KernelSpec::phi_prime_inv(double s) const {
  if (!(s < slope_sup())) {
    std::ostringstream os;
    os << "phi_prime_inv: s=" << s << " not in range of " << tag()
       << " derivative (sup " << slope_sup() << ")";
    throw RangeError(os.str());
  }
  switch (family_) {
    case KernelFamily::Shannon:
      return std::exp(s - 1.0);
    case KernelFamily::FermiDirac:
      // logistic, stable on both tails
      return s >= 0.0 ? 1.0 / (1.0 + std::exp(-s))
                      : std::exp(s) / (1.0 + std::exp(s));
    case KernelFamily::Burg:
      return -1.0 / s;
    case KernelFamily::FractionalPower:
      return std::pow((param_ - s) * (1.0 - param_) / param_,
                      1.0 / (param_ - 1.0));
    case KernelFamily::Hellinger: {
      if (std::abs(s) <= 1.0) return s / std::sqrt(1.0 + s * s);
      double r = 1.0 / s;  // avoids overflow of s*s
      return std::copysign(1.0 / std::sqrt(1.0 + r * r), s);
    }
    case KernelFamily::Polynomial:
      return std::pow(-1.0 / s, 1.0 / (1.0 + param_));
    case KernelFamily::Euclidean:
      return s;
  }
  return 0.0;
}

double KernelSpec::bregman(double y, double x) const {
  if (!in_interior(x)) domain_fail(*this, x, "bregman (second argument)");
  if (!in_closure(y)) domain_fail(*this, y, "bregman (first argument)");
  if (y == x) return 0.0;
  return phi(y) - phi(x) - phi_prime(x) * (y - x);
}

double bregman_vec(const KernelSpec& kernel, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& x) {
  if (y.size() != x.size())
    throw DimensionError("bregman_vec: size mismatch " +
                         std::to_string(y.size()) + " vs " +
                         std::to_string(x.size()));
  double s = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) s += kernel.bregman(y[i], x[i]);
  return s;
}

}  // namespace bregman
