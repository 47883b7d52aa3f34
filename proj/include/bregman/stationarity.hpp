#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "bregman/partition.hpp"
#include "bregman/problem.hpp"
#include "bregman/update.hpp"

namespace bregman {

// Tolerance ladder: kBoundaryTol (partition.hpp) classifies coordinates,
// kStationarityTol thresholds residuals, kMeasureTol takes the zero test of
// the extended measure.
inline constexpr double kStationarityTol = 1e-8;
inline constexpr double kMeasureTol = 1e-9;

/// D_h(T(x), x) at a strictly interior point: the classical Bregman
/// stationarity gap of the update mapping.
double measure_R(const ProblemInstance& problem, const Eigen::VectorXd& x,
                 double t);

/// Extended measure: sum over interior coordinates of D_phi(Tbar(x)_i, x_i).
/// Defined on all of X; zero exactly at fixed points of the extended update.
double measure_R_ext(const ProblemInstance& problem, const Eigen::VectorXd& x,
                     double t);

enum class StationarityClass { Stationary, Spurious, Nonstationary };

std::string to_string(StationarityClass c);

struct StationarityReport {
  double r_ext = 0.0;
  double euclid_residual = 0.0;
  // distance to a subgradient vanishing on the interior coordinates; zero
  // means some p in dF(x) has p_I = 0
  double interior_gap = 0.0;
  StationarityClass classification = StationarityClass::Nonstationary;
  Eigen::VectorXd witness;  // subgradient certificate
  std::string to_json() const;
};

/// Classify x as stationary (euclidean residual <= tol), spurious
/// (non-stationary but some subgradient vanishes on the interior
/// coordinates), or nonstationary.
StationarityReport detect(const ProblemInstance& problem,
                          const Eigen::VectorXd& x, double t,
                          double tol = kStationarityTol);

/// Enumerate vertices of a compact simplex/polytope, locate the maximizers
/// of f over them, and report each one that detect() classifies spurious.
/// Requires the caller-asserted convexity flag on f; n <= 12.
std::vector<std::pair<Eigen::VectorXd, StationarityReport>>
find_spurious_candidates(const ProblemInstance& problem, double t = 1.0,
                         double tol = kStationarityTol);

}  // namespace bregman
