#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "moreau/envelope.hpp"
#include "moreau/function.hpp"
#include "moreau/verify.hpp"

namespace moreau::cli {

/// Raised for malformed configs; maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<std::string> functions;  // catalog names
  std::vector<std::filesystem::path> definitions;
  std::vector<double> lambdas;
  bool lambdas_given = false;
  std::vector<double> sigmas;
  std::optional<double> epsilon;
  std::optional<double> radius;
  double range_min = -3.0;
  double range_max = 3.0;
  std::size_t points = 61;
  std::vector<Point> xs;
  std::vector<Point> starts;
  std::size_t max_iters = 20;
  std::optional<double> stop_tol;
  std::optional<double> step;
  std::size_t shift_draws = 20;
  std::uint64_t seed = 0;
  std::filesystem::path out = "moreau_out";

  ProxSolveConfig solver;
  VerifyConfig verify;
};

/// Parses `key = value` lines; repeated keys append to list-valued settings.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

/// Catalog entries and definition files named by the config, in that order.
std::vector<FunctionSpec> resolve_functions(const RunConfig& cfg);

}  // namespace moreau::cli
