#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "rescal/error.hpp"
#include "rescal/model.hpp"

namespace rescal::cli {

/// Bad invocation: missing input file, malformed arguments. Exit code 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Everything a `train` or `cv` run depends on.
struct RunConfig {
  std::string dataset;
  std::string output = "rescal-out";
  Hyperparams hp;
  Index folds = 10;
};

nlohmann::json to_json(const RunConfig& config);

/// Accepts a bare RunConfig object or a manifest with a "config" member.
/// Unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json& j);

void validate(const RunConfig& config);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::string& path, const std::string& content);

/// Runs one invocation. `args` excludes the program name. Returns the exit
/// code: 0 success, 1 runtime failure, 2 usage or configuration error.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace rescal::cli
