#pragma once

#include <Eigen/Dense>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bregman/problem.hpp"
#include "bregman/update.hpp"

namespace bregman {

struct RunConfig {
  double t = 1.0;                     // constant step size
  std::vector<double> step_sequence;  // overrides t when nonempty
  int max_iters = 1000;
  std::optional<double> stop_r_ext = 1e-10;  // nullopt disables
  std::optional<double> stop_residual;       // disabled by default
  int record_every = 1;
  enum class Mode { Linear, LogDomain } mode = Mode::Linear;
  bool force_generic = false;

  double step(int k) const {
    return step_sequence.empty() ? t
                                 : step_sequence[static_cast<std::size_t>(k) %
                                                 step_sequence.size()];
  }
};

struct TrajectoryPoint {
  int k = 0;
  Eigen::VectorXd x;
  double f = 0.0;
  double r_ext = 0.0;
  double residual = 0.0;
  double wall_time = 0.0;  // seconds since run start
};

enum class RunStatus { Converged, MaxIters, SolverError };

std::string to_string(RunStatus s);

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  RunStatus status = RunStatus::MaxIters;
  int iterations = 0;  // number of updates taken
  std::string error;   // populated on SolverError

  const TrajectoryPoint& back() const { return points.back(); }
};

/// Iterate x^{k+1} = T^{t_k}(x^k) from a strictly interior start until a
/// stopping rule fires. Every recorded iterate carries the extended measure,
/// the euclidean subdifferential residual and the objective value; the
/// terminal iterate is always recorded.
Trajectory run(const ProblemInstance& problem, const Eigen::VectorXd& x0,
               const RunConfig& cfg);

/// Log-domain entry point: x0 given as componentwise logs, so starts far
/// below the double underflow threshold stay exact. Requires
/// cfg.mode == Mode::LogDomain.
Trajectory run_log(const ProblemInstance& problem,
                   const Eigen::VectorXd& log_x0, const RunConfig& cfg);

/// CSV with header k,x1,...,xn,r_ext,residual,f; locale-independent,
/// newline-terminated.
void write_csv(const Trajectory& traj, std::ostream& os);

/// One-object JSON summary: status, iters, final_f, final_r_ext,
/// final_residual.
std::string summary_json(const Trajectory& traj);

}  // namespace bregman
