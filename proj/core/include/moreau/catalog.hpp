#pragma once

#include <string>
#include <vector>

#include "moreau/function.hpp"

namespace moreau::catalog {

FunctionSpec quadratic(double a);  // a x^2, a > 0
FunctionSpec absolute();           // |x|
FunctionSpec huber(double delta);
FunctionSpec indicator(double lo, double hi);  // closed box [lo,hi]
FunctionSpec neg_quadratic(double a);          // -a x^2, a > 0
FunctionSpec double_well();                    // (x^2 - 1)^2
FunctionSpec piecewise_min();                  // min(x^2, (x-2)^2 + 0.5)
FunctionSpec abs_plus_quadratic();             // |x| + x^2
FunctionSpec cubic();                          // x^3, not prox-bounded; for fault injection

/// f(x1, x2) = f1(x1) + f2(x2).
FunctionSpec separable_sum(const FunctionSpec& f1, const FunctionSpec& f2);

/// Resolves "abs", "quad(2)", "neg_quad(0.5)", "indicator[0,1]", "huber(1)",
/// "double_well", "piecewise_min", "abs_plus_quad", "quad_abs_2d",
/// "double_well_quad_2d". Throws InvalidArgument on unknown names.
FunctionSpec by_name(const std::string& spec);

std::vector<std::string> names();

/// The standard matrix used by the verification suite.
std::vector<FunctionSpec> default_matrix();

}  // namespace moreau::catalog
