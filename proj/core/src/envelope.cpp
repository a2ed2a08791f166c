#include "moreau/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace moreau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxGridPoints = 40'000'000;

void validate(const ProxSolveConfig& cfg, std::size_t dim) {
  if (!(cfg.step_for(dim) > 0.0)) throw InvalidArgument("grid_step must be positive");
  if (cfg.refine_iters < 0) throw InvalidArgument("refine_iters must be >= 0");
  if (!(cfg.value_tol > 0.0)) throw InvalidArgument("value_tol must be positive");
  if (!(cfg.cluster_radius_for(dim) > 0.0)) throw InvalidArgument("cluster_radius must be positive");
}

void check_inputs(const FunctionSpec& f, double lambda, const Point& x) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be positive and finite");
  if (x.dim() != f.dim) throw DimensionMismatch(f.dim, x.dim());
}

struct Sample {
  double value = kInf;
  Point point;
};

/// Lower value wins; equal values go to the lexicographically smaller point.
bool better(double v, const Point& p, const Sample& s) {
  if (v != s.value) return v < s.value;
  return s.point.dim() == 0 || p < s.point;
}

class Objective {
 public:
  Objective(const FunctionSpec& f, double lambda, const Point& x) : f_(f), inv2l_(0.5 / lambda), x_(x) {}

  double operator()(const Point& w) const {
    const double v = f_.evaluator(w).value();
    if (!std::isfinite(v)) return kInf;
    return v + squared_distance(w, x_) * inv2l_;
  }

  const Point& center() const { return x_; }

 private:
  const FunctionSpec& f_;
  double inv2l_;
  const Point& x_;
};

struct UpperBound {
  double value = kInf;
  std::vector<Point> points;  // finite candidates seen
};

/// Finite upper bounds on e_lambda f(x): the objective at x, at the
/// catalog feasible point, at the anchor, and at the last feasible point on
/// the segment from x toward the feasible point.
UpperBound upper_bound(const FunctionSpec& f, const Objective& g, const Point& x) {
  UpperBound ub;
  auto consider = [&](const Point& p) {
    const double v = g(p);
    if (std::isfinite(v)) {
      ub.value = std::min(ub.value, v);
      ub.points.push_back(p);
    }
  };
  consider(x);
  if (f.feasible_point) consider(*f.feasible_point);
  consider(f.certificate.anchor);
  if (!std::isfinite(g(x)) && !ub.points.empty()) {
    const Point feasible = f.feasible_point && std::isfinite(g(*f.feasible_point)) ? *f.feasible_point : ub.points.front();
    double lo = 0.0, hi = 1.0;  // fraction of the way from feasible toward x
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (std::isfinite(g(feasible + mid * (x - feasible)))) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    consider(feasible + lo * (x - feasible));
  }
  return ub;
}

double radius_from_bound(const ProxBoundCertificate& c, double lambda, double lambda1, const Point& x, double upper) {
  double alpha = c.alpha;
  if (!c.verified) alpha = std::min(alpha, -1.0 / (2.0 * lambda1));
  const double gap = upper - c.beta;
  if (alpha >= 0.0) return gap > 0.0 ? std::sqrt(2.0 * lambda * gap) : 0.0;
  // alpha (d + s)^2 + beta + d^2/(2 lambda) > U for d > R.
  const double s = distance(x, c.anchor);
  const double c2 = 0.5 / lambda + alpha;
  if (!(c2 > 0.0)) return kInf;
  const double c0 = alpha * s * s - gap;
  const double disc = alpha * alpha * s * s - c2 * c0;
  if (disc < 0.0) return 0.0;
  return std::max(0.0, (-alpha * s + std::sqrt(disc)) / c2);
}

Sample refine_1d(const Objective& g, const Point& start, double start_value, double h, int iters) {
  Sample best{start_value, start};
  double lo = start[0] - h, hi = start[0] + h;
  Point w{0.0};
  auto probe = [&](double t) {
    w[0] = t;
    const double v = g(w);
    if (better(v, w, best)) best = {v, w};
    return v;
  };
  for (int it = 0; it < iters; ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    const double v1 = probe(m1);
    const double v2 = probe(m2);
    if (v1 <= v2) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return best;
}

Sample refine_compass(const Objective& g, const Point& start, double start_value, double h, int iters) {
  Sample best{start_value, start};
  double step = h;
  for (int it = 0; it < iters; ++it) {
    Sample round = best;
    for (std::size_t d = 0; d < start.dim(); ++d) {
      for (double sign : {-1.0, 1.0}) {
        Point w = best.point;
        w[d] += sign * step;
        const double v = g(w);
        if (better(v, w, round)) round = {v, w};
      }
    }
    if (round.value < best.value) {
      best = round;
    } else {
      step *= 0.5;
    }
  }
  return best;
}

/// Grid local minima of the objective on the ball B_R(x).
std::vector<Sample> grid_local_minima(const Objective& g, const Point& x, double radius, double h) {
  const std::size_t dim = x.dim();
  const long n = std::max<long>(1, static_cast<long>(std::ceil(radius / h)));
  const double side = 2.0 * static_cast<double>(n) + 1.0;
  if (std::pow(side, static_cast<double>(dim)) > static_cast<double>(kMaxGridPoints)) {
    throw InvalidArgument(fmt::format("prox grid with radius {} and step {} exceeds {} points; raise grid_step",
                                      radius, h, kMaxGridPoints));
  }
  std::vector<Sample> minima;
  if (dim == 1) {
    std::vector<double> values(static_cast<std::size_t>(2 * n + 1));
    Point w{0.0};
    for (long i = -n; i <= n; ++i) {
      w[0] = x[0] + static_cast<double>(i) * h;
      values[static_cast<std::size_t>(i + n)] = g(w);
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      if (!std::isfinite(v)) continue;
      if (i > 0 && values[i - 1] < v) continue;
      if (i + 1 < values.size() && values[i + 1] < v) continue;
      minima.push_back({v, Point{x[0] + (static_cast<double>(i) - static_cast<double>(n)) * h}});
    }
    return minima;
  }

  // n-D: dense storage over the cube, points outside the ball are +inf.
  const std::size_t m = static_cast<std::size_t>(2 * n + 1);
  std::size_t total = 1;
  for (std::size_t d = 0; d < dim; ++d) total *= m;
  std::vector<double> values(total, kInf);
  const double r2 = (radius + h) * (radius + h);
  std::vector<long> idx(dim, -n);
  Point w = x;
  for (std::size_t flat = 0; flat < total; ++flat) {
    double d2 = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      const double off = static_cast<double>(idx[d]) * h;
      w[d] = x[d] + off;
      d2 += off * off;
    }
    if (d2 <= r2) values[flat] = g(w);
    for (std::size_t d = dim; d-- > 0;) {
      if (++idx[d] <= n) break;
      idx[d] = -n;
    }
  }
  std::vector<std::size_t> stride(dim, 1);
  for (std::size_t d = dim - 1; d-- > 0;) stride[d] = stride[d + 1] * m;
  for (std::size_t flat = 0; flat < total; ++flat) {
    const double v = values[flat];
    if (!std::isfinite(v)) continue;
    bool is_min = true;
    Point p = x;
    for (std::size_t d = 0; d < dim && is_min; ++d) {
      const std::size_t coord = (flat / stride[d]) % m;
      p[d] = x[d] + (static_cast<double>(coord) - static_cast<double>(n)) * h;
      if (coord > 0 && values[flat - stride[d]] < v) is_min = false;
      if (coord + 1 < m && values[flat + stride[d]] < v) is_min = false;
    }
    if (is_min) minima.push_back({v, p});
  }
  return minima;
}

/// Clusters points within `radius` of a representative (best first) and
/// returns the representatives sorted lexicographically.
std::vector<Point> cluster(std::vector<Sample> samples, double radius) {
  std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    return a.value < b.value || (a.value == b.value && a.point < b.point);
  });
  std::vector<Point> reps;
  for (Sample& s : samples) {
    const bool joined = std::any_of(reps.begin(), reps.end(), [&](const Point& r) { return distance(r, s.point) <= radius; });
    if (!joined) reps.push_back(std::move(s.point));
  }
  std::sort(reps.begin(), reps.end());
  return reps;
}

ProxResult grid_solve(const FunctionSpec& f, double lambda, const Point& x, double radius,
                      const std::vector<Point>& extra, const ProxSolveConfig& cfg) {
  const Objective g(f, lambda, x);
  const double h = cfg.step_for(f.dim);
  std::vector<Sample> minima = grid_local_minima(g, x, radius, h);
  for (const Point& p : extra) {
    if (distance(p, x) <= radius + h) {
      const double v = g(p);
      if (std::isfinite(v)) minima.push_back({v, p});
    }
  }
  if (minima.empty()) throw NoFeasiblePoint(fmt::format("no finite objective value within radius {} of [{}]", radius, format_point(x)));

  std::sort(minima.begin(), minima.end(), [](const Sample& a, const Sample& b) {
    return a.value < b.value || (a.value == b.value && a.point < b.point);
  });
  const double cutoff = minima.front().value + cfg.candidate_slack;
  std::vector<Sample> refined;
  for (const Sample& s : minima) {
    if (s.value > cutoff || refined.size() >= cfg.max_candidates) break;
    refined.push_back(f.dim == 1 ? refine_1d(g, s.point, s.value, h, cfg.refine_iters)
                                 : refine_compass(g, s.point, s.value, h, cfg.refine_iters));
  }
  double best = kInf;
  for (const Sample& s : refined) best = std::min(best, s.value);
  std::vector<Sample> selected;
  for (Sample& s : refined) {
    if (s.value <= best + cfg.value_tol) selected.push_back(std::move(s));
  }
  ProxResult out;
  out.envelope_value = ExtendedReal(best);
  out.minimizers = cluster(std::move(selected), cfg.cluster_radius_for(f.dim));
  out.radius_used = radius;
  return out;
}

struct ProbeResult {
  bool diverged = false;
  double radius = 0.0;
};

/// Expanding coarse search used when lambda is not below the certified
/// threshold.
ProbeResult divergence_probe(const FunctionSpec& f, double lambda, const Point& x, const ProxSolveConfig& cfg) {
  const Objective g(f, lambda, x);
  const std::size_t dim = f.dim;
  const std::size_t per_axis = std::max<std::size_t>(3, dim == 1 ? cfg.probe_points_1d : cfg.probe_points_nd);
  const double r0 = std::max(1.0, 2.0 * (distance(x, f.certificate.anchor) + 1.0));
  double previous = kInf;
  bool all_boundary = true;
  for (int k = 0; k <= cfg.max_expansions; ++k) {
    const double radius = r0 * std::ldexp(1.0, k);
    const double spacing = 2.0 * radius / static_cast<double>(per_axis - 1);
    Sample best;
    std::vector<std::size_t> idx(dim, 0);
    Point w = x;
    while (true) {
      double d2 = 0.0;
      for (std::size_t d = 0; d < dim; ++d) {
        const double off = -radius + spacing * static_cast<double>(idx[d]);
        w[d] = x[d] + off;
        d2 += off * off;
      }
      if (d2 <= radius * radius * (1.0 + 1e-12)) {
        const double v = g(w);
        if (better(v, w, best)) best = {v, w};
      }
      std::size_t d = 0;
      while (d < dim && ++idx[d] == per_axis) idx[d++] = 0;
      if (d == dim) break;
    }
    if (!std::isfinite(best.value)) {
      previous = kInf;
      all_boundary = false;
      continue;
    }
    if (best.value < cfg.divergence_guard) return {true, radius};
    const bool on_boundary = distance(best.point, x) >= radius - 1.5 * spacing;
    const bool decreasing = best.value < previous;
    if (!on_boundary || !decreasing) {
      all_boundary = false;
      return {false, radius};
    }
    previous = best.value;
  }
  return {all_boundary, r0 * std::ldexp(1.0, cfg.max_expansions)};
}

ProxResult from_closed_form(const FunctionSpec& f, double lambda, const Point& x, std::vector<Point> reps) {
  const Objective g(f, lambda, x);
  double best = kInf;
  double radius = 0.0;
  for (const Point& p : reps) {
    best = std::min(best, g(p));
    radius = std::max(radius, distance(p, x));
  }
  std::sort(reps.begin(), reps.end());
  ProxResult out;
  out.envelope_value = ExtendedReal(best);
  out.minimizers = std::move(reps);
  out.radius_used = radius;
  out.closed_form = true;
  return out;
}

}  // namespace

double ProxSolveConfig::step_for(std::size_t dim) const {
  if (grid_step) return *grid_step;
  return dim == 1 ? 1e-3 : 1e-2;
}

double ProxSolveConfig::cluster_radius_for(std::size_t dim) const {
  return cluster_radius ? *cluster_radius : 10.0 * step_for(dim);
}

double ProxSolveConfig::lambda1_for(double lambda, ExtendedReal threshold) const {
  if (lambda1) {
    if (!(*lambda1 > lambda) || !(ExtendedReal(*lambda1) < threshold)) {
      throw InvalidArgument(fmt::format("lambda1 = {} must lie in (lambda, lambda_phi) = ({}, {})", *lambda1, lambda,
                                        threshold.value()));
    }
    return *lambda1;
  }
  if (threshold.is_infinite()) return 2.0 * lambda;
  return 0.5 * (lambda + threshold.value());
}

double search_radius(const FunctionSpec& f, double lambda, const Point& x, const ProxSolveConfig& cfg) {
  check_inputs(f, lambda, x);
  ensure_certificate(f);
  const ExtendedReal threshold = prox_bound_threshold(f.certificate);
  if (!(ExtendedReal(lambda) < threshold)) throw ThresholdExceeded(lambda, threshold.value(), f.name);
  const Objective g(f, lambda, x);
  const UpperBound ub = upper_bound(f, g, x);
  if (!std::isfinite(ub.value)) throw NoFeasiblePoint("no finite objective value to bound the envelope of " + f.name);
  // one grid step of margin keeps the ball nondegenerate when U is attained at x
  return radius_from_bound(f.certificate, lambda, cfg.lambda1_for(lambda, threshold), x, ub.value) + cfg.step_for(f.dim);
}

namespace {

// prox of a block-separable sum is the product of the blockwise proxes
ProxResult separable_solve(const FunctionSpec& f, double lambda, const Point& x, const ProxSolveConfig& cfg) {
  ProxResult out;
  out.envelope_value = ExtendedReal(0.0);
  out.closed_form = true;
  out.minimizers = {Point{}};
  std::size_t offset = 0;
  for (const FunctionSpec& part : f.parts) {
    Point sub = Point::zeros(part.dim);
    for (std::size_t d = 0; d < part.dim; ++d) sub[d] = x[offset + d];
    offset += part.dim;
    const ProxResult r = prox_map(part, lambda, sub, cfg);
    out.radius_used = std::max(out.radius_used, r.radius_used);
    if (r.diverged) {
      out.diverged = true;
      out.minimizers.clear();
      return out;
    }
    out.closed_form = out.closed_form && r.closed_form;
    out.envelope_value = out.envelope_value + r.envelope_value;
    std::vector<Point> next;
    for (const Point& head : out.minimizers) {
      for (const Point& tail : r.minimizers) {
        std::vector<double> c(head.begin(), head.end());
        c.insert(c.end(), tail.begin(), tail.end());
        next.emplace_back(std::move(c));
      }
    }
    out.minimizers = std::move(next);
  }
  std::sort(out.minimizers.begin(), out.minimizers.end());
  return out;
}

}  // namespace

ProxResult prox_map(const FunctionSpec& f, double lambda, const Point& x, const ProxSolveConfig& cfg) {
  check_inputs(f, lambda, x);
  validate(cfg, f.dim);
  ensure_certificate(f);
  if (!f.parts.empty()) return separable_solve(f, lambda, x, cfg);
  const ExtendedReal threshold = prox_bound_threshold(f.certificate);
  const bool below = ExtendedReal(lambda) < threshold;

  if (cfg.method != ProxMethod::grid && f.closed_form_prox && below) {
    std::vector<Point> reps = f.closed_form_prox(lambda, x);
    if (!reps.empty()) return from_closed_form(f, lambda, x, std::move(reps));
  }
  if (cfg.method == ProxMethod::closed_form) {
    if (!below) throw ThresholdExceeded(lambda, threshold.value(), f.name);
    throw InvalidArgument("no closed-form prox available for " + f.name);
  }

  if (below) {
    const Objective g(f, lambda, x);
    const UpperBound ub = upper_bound(f, g, x);
    if (!std::isfinite(ub.value)) throw NoFeasiblePoint("no finite objective value to bound the envelope of " + f.name);
    const double radius =
        radius_from_bound(f.certificate, lambda, cfg.lambda1_for(lambda, threshold), x, ub.value) + cfg.step_for(f.dim);
    return grid_solve(f, lambda, x, radius, ub.points, cfg);
  }

  const ProbeResult probe = divergence_probe(f, lambda, x, cfg);
  if (probe.diverged) {
    ProxResult out;
    out.diverged = true;
    out.radius_used = probe.radius;
    return out;
  }
  const Objective g(f, lambda, x);
  return grid_solve(f, lambda, x, probe.radius, upper_bound(f, g, x).points, cfg);
}

ExtendedReal moreau_envelope(const FunctionSpec& f, double lambda, const Point& x, const ProxSolveConfig& cfg) {
  const ProxResult r = prox_map(f, lambda, x, cfg);
  if (r.diverged) throw ThresholdExceeded(lambda, prox_bound_threshold(f.certificate).value(), f.name);
  return r.envelope_value;
}

namespace {

void check_shift_lambda(const FunctionSpec& f, const QuadShift& s, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  if (s.sigma == 0.0 || !std::isfinite(s.sigma)) throw InvalidArgument("sigma must be finite and nonzero");
  if (s.center.dim() != f.dim) throw DimensionMismatch(f.dim, s.center.dim());
  if (!(lambda * std::abs(s.sigma) < 1.0)) {
    throw InvalidLambda(fmt::format("lambda = {} must be below 1/|sigma| = {}", lambda, 1.0 / std::abs(s.sigma)));
  }
}

}  // namespace

ExtendedReal envelope_via_shift(const FunctionSpec& f, const QuadShift& s, double lambda, const Point& x,
                                const ProxSolveConfig& cfg) {
  check_shift_lambda(f, s, lambda);
  if (x.dim() != f.dim) throw DimensionMismatch(f.dim, x.dim());
  const ExtendedReal threshold = prox_bound_threshold(f.certificate);
  if (!(ExtendedReal(lambda) < threshold)) throw ThresholdExceeded(lambda, threshold.value(), f.name);

  const double k = 1.0 + s.sigma * lambda;
  const FunctionSpec psi = quad_shift(f, s);
  const Point inner_x = (x + (s.sigma * lambda) * s.center) / k;
  const ProxResult inner = prox_map(psi, lambda / k, inner_x, cfg);
  if (inner.diverged) throw ThresholdExceeded(lambda / k, prox_bound_threshold(psi.certificate).value(), psi.name);
  return inner.envelope_value + s.sigma / (2.0 * k) * squared_distance(x, s.center);
}

ExtendedReal shift_envelope_via_f(const FunctionSpec& f, const QuadShift& s, double lambda, const Point& x,
                                  const ProxSolveConfig& cfg) {
  check_shift_lambda(f, s, lambda);
  if (x.dim() != f.dim) throw DimensionMismatch(f.dim, x.dim());
  const double k = 1.0 - s.sigma * lambda;
  const double outer_lambda = lambda / k;
  const ExtendedReal threshold = prox_bound_threshold(f.certificate);
  if (!(ExtendedReal(outer_lambda) < threshold)) throw ThresholdExceeded(outer_lambda, threshold.value(), f.name);

  const Point inner_x = (x - (s.sigma * lambda) * s.center) / k;
  const ExtendedReal e = moreau_envelope(f, outer_lambda, inner_x, cfg);
  return e - s.sigma / (2.0 * k) * squared_distance(x, s.center);
}

Point envelope_gradient(const FunctionSpec& f, double lambda, const Point& x, const ProxSolveConfig& cfg) {
  const ProxResult r = prox_map(f, lambda, x, cfg);
  if (r.diverged) throw ThresholdExceeded(lambda, prox_bound_threshold(f.certificate).value(), f.name);
  if (r.minimizers.size() != 1) throw MultivaluedProx(r.minimizers.size());
  return (x - r.minimizers.front()) / lambda;
}

FunctionSpec envelope_function(const FunctionSpec& f, double lambda, const ProxSolveConfig& cfg) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  const ExtendedReal threshold = prox_bound_threshold(f.certificate);
  if (!(ExtendedReal(lambda) < threshold)) throw ThresholdExceeded(lambda, threshold.value(), f.name);

  FunctionSpec e;
  e.name = fmt::format("envelope[{}]({})", lambda, f.name);
  e.dim = f.dim;
  e.evaluator = [f, lambda, cfg](const Point& x) { return moreau_envelope(f, lambda, x, cfg); };
  // Envelope of the quadratic minorant.
  const ProxBoundCertificate& c = f.certificate;
  e.certificate = ProxBoundCertificate{c.alpha / (1.0 + 2.0 * lambda * c.alpha), c.beta, c.anchor, true};
  e.feasible_point = f.feasible_point ? *f.feasible_point : c.anchor;
  e.convex = f.convex;
  return e;
}

}  // namespace moreau
