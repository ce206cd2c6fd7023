#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace nadqec {

using Objective = std::function<double(std::span<const double>)>;

struct OptimizeOptions {
  int restarts = 20;
  /// Restarts run in fixed-size batches; the search stops after the first
  /// batch that reaches `target_cost`. The batch size is independent of the
  /// thread count, so results are reproducible on any machine.
  int batch_size = 4;
  double target_cost = 1e-6;
  int simplex_max_evals = 20000;
  double simplex_initial_step = 0.6;
  double fd_step = 1e-6;
  int bfgs_max_iters = 400;
  /// Initial points are drawn uniformly in [-init_range, init_range].
  double init_range = 3.141592653589793;
};

struct OptimizeResult {
  std::vector<double> x;
  double cost = 0.0;
  bool converged = false;
  int best_restart = -1;
  int restarts_run = 0;
  long evaluations = 0;
};

/// Nelder-Mead with dimension-adaptive coefficients.
OptimizeResult nelder_mead(const Objective& f, std::vector<double> x0, double step, int max_evals, double ftol = 1e-15);

/// BFGS on central finite-difference gradients with Armijo backtracking.
OptimizeResult bfgs_refine(const Objective& f, std::vector<double> x0, double fd_step, int max_iters);

/// Multi-start simplex search, each restart refined by BFGS. The objective
/// must be safe to call concurrently. Deterministic in `seed`; ties between
/// restarts go to the lower restart index.
OptimizeResult minimize(const Objective& f, int dimension, std::uint64_t seed, const OptimizeOptions& options = {});

}  // namespace nadqec
