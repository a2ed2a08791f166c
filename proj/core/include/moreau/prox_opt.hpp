#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "moreau/envelope.hpp"

namespace moreau {

struct IterTrace {
  std::vector<Point> points;
  std::vector<double> values;  // e_lambda f at each point
  bool converged = false;
  std::size_t iterations = 0;
  /// Steps where the prox had more than one cluster.
  std::size_t multivalued_steps = 0;
  bool aborted = false;
  std::string message;
};

/// x_{k+1} = the prox representative nearest to x_k.
IterTrace proximal_point_run(const FunctionSpec& f, const Point& x0, double lambda,
                             std::size_t max_iters, double stop_tol,
                             const ProxSolveConfig& cfg = {});

/// x_{k+1} = x_k - step * grad e_lambda f(x_k). Stops with aborted = true and
/// the partial trace when the prox is multivalued.
IterTrace envelope_gd_run(const FunctionSpec& f, const Point& x0, double lambda, double step,
                          std::size_t max_iters, double stop_tol,
                          const ProxSolveConfig& cfg = {});

/// max_k |a_k - b_k| over the common prefix.
double compare_traces(const IterTrace& a, const IterTrace& b);

/// CSV with header iter,x1..xn,envelope_value and 17 significant digits.
void write_trace_csv(const IterTrace& trace, std::ostream& out);

}  // namespace moreau
