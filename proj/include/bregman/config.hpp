#pragma once

#include <optional>
#include <string>

#include "bregman/driver.hpp"
#include "bregman/hardness.hpp"
#include "bregman/problem.hpp"
#include "bregman/stationarity.hpp"

namespace bregman {

/// Parsed experiment configuration. One JSON object covers the problem
/// description plus whichever command payload is present; parse/serialize
/// round-trips are identity on the fields a command consumes.
///
/// Problem fields:
///   instance   builtin name, "custom", or "random_polytope"
///   kernel     kernel tag override (optional)
///   surrogate  "linear" | "quadratic_diag" | "full_objective"
///   t          step size; t_bar is max(1, t)
///   constraint {"type":"simplex","n":..} | {"type":"polytope","A":..,"b":..}
///              | {"type":"box","lower":..,"upper":..}        (custom only)
///   objective  {"type":"linear","c":..,"constant":..}
///              | {"type":"quadratic","Q":..,"q":..,"convex":..} (custom only)
///   n, m, seed random_polytope parameters
///
/// Run fields: x0, max_iters, stop_r_ext, stop_residual, record_every, mode.
/// Trap fields: eps, K, alpha, instances (["entropy","poly"]).
/// Scan fields: tol.
struct ExperimentConfig {
  std::string raw;  // original text, for error reporting

  double t = 1.0;
  std::optional<ProblemInstance> problem;

  RunConfig run;
  std::optional<Eigen::VectorXd> x0;

  double trap_eps = 0.1;
  int trap_K = 120;
  double trap_alpha = 1.0;
  bool trap_entropy = true;
  bool trap_poly = true;

  double scan_tol = kStationarityTol;
};

/// Parse a config JSON document. `seed_override`, when set, replaces the
/// seed used by generated instances. ConfigError carries a line-anchored
/// message on malformed input.
ExperimentConfig parse_config(const std::string& text,
                              std::optional<unsigned> seed_override = {});

ExperimentConfig load_config_file(const std::string& path,
                                  std::optional<unsigned> seed_override = {});

/// Serialize the problem/run portion back to JSON (used by round-trip
/// checks and by `--emit-config`).
std::string config_to_json(const ExperimentConfig& cfg);

/// Deterministic compact polytope {Ax=b, x>=0} with a strictly feasible
/// point, plus a convex nonconstant quadratic objective; seeded.
ProblemInstance random_polytope_instance(int n, int m, unsigned seed,
                                         const KernelSpec& kernel,
                                         double t_bar = 1.0);

}  // namespace bregman
