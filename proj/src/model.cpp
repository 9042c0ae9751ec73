#include "rescal/model.hpp"

#include <cmath>

namespace rescal {

std::string_view to_string(Solver s) { return s == Solver::als ? "als" : "logit"; }

std::string_view to_string(InitMethod m) { return m == InitMethod::random ? "random" : "nvecs"; }

Solver parse_solver(std::string_view text) {
  if (text == "als") return Solver::als;
  if (text == "logit") return Solver::logit;
  throw ConfigError("unknown solver '" + std::string(text) + "' (expected als or logit)");
}

InitMethod parse_init(std::string_view text) {
  if (text == "random") return InitMethod::random;
  if (text == "nvecs") return InitMethod::nvecs;
  throw ConfigError("unknown init '" + std::string(text) + "' (expected random or nvecs)");
}

void validate(const Hyperparams& hp) {
  if (hp.rank < 1) throw ConfigError("rank must be >= 1, got " + std::to_string(hp.rank));
  if (!(hp.lambda_a >= 0.0) || !std::isfinite(hp.lambda_a))
    throw ConfigError("lambda_a must be finite and >= 0");
  if (!(hp.lambda_r >= 0.0) || !std::isfinite(hp.lambda_r))
    throw ConfigError("lambda_r must be finite and >= 0");
  if (!(hp.tol > 0.0)) throw ConfigError("tol must be > 0");
  if (hp.max_iter < 1) throw ConfigError("max_iter must be >= 1");
  if (hp.dense_cap < 1) throw ConfigError("dense_cap must be >= 1");
}

}  // namespace rescal
