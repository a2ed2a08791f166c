#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace moreau::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kThresholdExceeded = 3,
};

struct Options {
  bool json_summary = false;
};

int cmd_envelope(const RunConfig& cfg, const Options& opt, std::ostream& out);
int cmd_prox(const RunConfig& cfg, const Options& opt, std::ostream& out);
int cmd_verify(const RunConfig& cfg, const Options& opt, std::ostream& out);
int cmd_optimize(const RunConfig& cfg, const Options& opt, std::ostream& out);
int cmd_threshold(const RunConfig& cfg, const Options& opt, std::ostream& out);

/// Entry point: args excludes the program name. Maps errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace moreau::cli
