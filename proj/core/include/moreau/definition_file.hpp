#pragma once

#include <filesystem>
#include <string>

#include "moreau/function.hpp"

namespace moreau {

// Plain-text function definition:
//
//   # comment
//   expr = (x1^2-1)^2
//   dim = 1
//   alpha = 0
//   beta = 0
//   anchor = 0
//   minimizer = 1 strong 6 0.1     # point kind [modulus] [epsilon]
//   minimizer = -1 local 0 0.1
//
// alpha/beta/anchor are optional; without them the certificate is fitted by
// sampling. Either way the certificate is validated before envelope use.

FunctionSpec parse_function_definition(const std::string& text, const std::string& name = "definition");
FunctionSpec load_function_definition(const std::filesystem::path& path);

}  // namespace moreau
