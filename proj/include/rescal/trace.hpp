#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace rescal {

/// Convergence diagnostics of one fit. `objective[t]` and `seconds[t]` are
/// recorded after iteration t + 1; `seconds` is cumulative wall time.
struct FitTrace {
  double initial_objective = 0.0;
  std::vector<double> objective;
  std::vector<double> seconds;
  std::int64_t iterations_run = 0;
  bool converged = false;
  double wall_time = 0.0;
  std::string diagnostic;
};

/// Scale-free stopping rule |f_t - f_{t-1}| / max(1, f_{t-1}) < tol.
inline bool relative_change_below(double previous, double current, double tol) {
  return std::abs(current - previous) / std::max(1.0, std::abs(previous)) < tol;
}

}  // namespace rescal
