#include "rescal/lbfgs.hpp"

namespace rescal {

void validate(const LbfgsOptions& opts) {
  if (opts.memory < 1) throw ConfigError("L-BFGS memory must be >= 1");
  if (opts.max_iter < 0) throw ConfigError("L-BFGS max_iter must be >= 0");
  if (!(opts.c1 > 0.0 && opts.c1 < opts.c2 && opts.c2 < 1.0))
    throw ConfigError("line search constants must satisfy 0 < c1 < c2 < 1");
  if (!(opts.grad_tol >= 0.0) || !(opts.rel_tol >= 0.0))
    throw ConfigError("L-BFGS tolerances must be >= 0");
  if (opts.max_line_search < 1) throw ConfigError("max_line_search must be >= 1");
}

}  // namespace rescal
