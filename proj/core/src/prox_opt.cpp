#include "moreau/prox_opt.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "moreau/errors.hpp"

namespace moreau {

namespace {

void check_run_args(const FunctionSpec& f, const Point& x0, double lambda, double stop_tol) {
  if (x0.dim() != f.dim) throw DimensionMismatch(f.dim, x0.dim());
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (!(stop_tol >= 0.0)) throw InvalidArgument("stop tolerance must be non-negative");
}

ProxResult solve(const FunctionSpec& f, double lambda, const Point& x, const ProxSolveConfig& cfg) {
  ProxResult r = prox_map(f, lambda, x, cfg);
  if (r.diverged) throw ThresholdExceeded(lambda, prox_bound_threshold(f.certificate).value(), f.name);
  return r;
}

const Point& nearest(const std::vector<Point>& reps, const Point& x) {
  // reps are sorted, so strict < keeps the lexicographically smaller on ties
  std::size_t best = 0;
  double best_d = squared_distance(reps[0], x);
  for (std::size_t i = 1; i < reps.size(); ++i) {
    const double d = squared_distance(reps[i], x);
    if (d < best_d) {
      best = i;
      best_d = d;
    }
  }
  return reps[best];
}

}  // namespace

IterTrace proximal_point_run(const FunctionSpec& f, const Point& x0, double lambda, std::size_t max_iters,
                             double stop_tol, const ProxSolveConfig& cfg) {
  check_run_args(f, x0, lambda, stop_tol);
  IterTrace trace;
  Point x = x0;
  ProxResult r = solve(f, lambda, x, cfg);
  trace.points.push_back(x);
  trace.values.push_back(r.envelope_value.value());
  while (trace.iterations < max_iters) {
    if (r.minimizers.size() > 1) ++trace.multivalued_steps;
    Point next = nearest(r.minimizers, x);
    const double step = distance(next, x);
    x = std::move(next);
    ++trace.iterations;
    r = solve(f, lambda, x, cfg);
    trace.points.push_back(x);
    trace.values.push_back(r.envelope_value.value());
    if (step <= stop_tol) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

IterTrace envelope_gd_run(const FunctionSpec& f, const Point& x0, double lambda, double step, std::size_t max_iters,
                          double stop_tol, const ProxSolveConfig& cfg) {
  check_run_args(f, x0, lambda, stop_tol);
  if (!(step >= 0.0)) throw InvalidArgument("step must be non-negative");
  IterTrace trace;
  Point x = x0;
  ProxResult r = solve(f, lambda, x, cfg);
  trace.points.push_back(x);
  trace.values.push_back(r.envelope_value.value());
  while (trace.iterations < max_iters) {
    if (r.minimizers.size() > 1) {
      ++trace.multivalued_steps;
      trace.aborted = true;
      trace.message = fmt::format("prox of {} at [{}] has {} clusters", f.name, format_point(x), r.minimizers.size());
      break;
    }
    Point grad = (x - r.minimizers.front()) / lambda;
    Point next = x - step * grad;
    const double moved = distance(next, x);
    x = std::move(next);
    ++trace.iterations;
    r = solve(f, lambda, x, cfg);
    trace.points.push_back(x);
    trace.values.push_back(r.envelope_value.value());
    if (moved <= stop_tol) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

double compare_traces(const IterTrace& a, const IterTrace& b) {
  double worst = 0.0;
  const std::size_t n = std::min(a.points.size(), b.points.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (a.points[k].dim() != b.points[k].dim()) throw DimensionMismatch(a.points[k].dim(), b.points[k].dim());
    worst = std::max(worst, distance(a.points[k], b.points[k]));
  }
  return worst;
}

void write_trace_csv(const IterTrace& trace, std::ostream& out) {
  const std::size_t dim = trace.points.empty() ? 1 : trace.points.front().dim();
  out << "iter";
  for (std::size_t d = 1; d <= dim; ++d) out << ",x" << d;
  out << ",envelope_value\n";
  for (std::size_t k = 0; k < trace.points.size(); ++k) {
    out << k << ',' << format_point(trace.points[k]) << ',' << fmt::format("{:.17g}", trace.values[k]) << '\n';
  }
}

}  // namespace moreau
