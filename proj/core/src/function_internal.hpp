#pragma once

#include "moreau/function.hpp"

namespace moreau::detail {

struct FeasibleFit {
  ProxBoundCertificate certificate;
  Point feasible_point;
};

FeasibleFit fit_certificate_with_point(const Evaluator& evaluator, std::size_t dim, const Point& anchor);

/// Closed-form prox of q|x - m|^2 + k; empty when 1 + 2 lambda q <= 0.
ClosedFormProx quadratic_prox(const QuadraticModel& q);

}  // namespace moreau::detail
