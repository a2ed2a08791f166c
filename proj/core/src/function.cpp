#include "moreau/function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include <fmt/format.h>

#include "function_internal.hpp"
#include "moreau/sampling.hpp"

namespace moreau {

class CertificateCache {
 public:
  const CertificateCheck& get(const FunctionSpec& f) {
    std::call_once(once_, [&] { result_ = check_certificate(f); });
    return result_;
  }

 private:
  std::once_flag once_;
  CertificateCheck result_;
};

ExtendedReal prox_bound_threshold(const ProxBoundCertificate& c) {
  if (c.alpha >= 0.0) return ExtendedReal::infinity();
  return ExtendedReal(-1.0 / (2.0 * c.alpha));
}

const char* to_string(MinimizerKind kind) { return kind == MinimizerKind::strong ? "strong" : "local"; }

ExtendedReal evaluate(const FunctionSpec& f, const Point& x) {
  if (x.dim() != f.dim) throw DimensionMismatch(f.dim, x.dim());
  return f.evaluator(x);
}

namespace {

std::string shift_expression(const std::string& expr, const QuadShift& s) {
  std::string norm2;
  for (std::size_t i = 0; i < s.center.dim(); ++i) {
    if (i > 0) norm2 += "+";
    norm2 += fmt::format("(x{}-({:.17g}))^2", i + 1, s.center[i]);
  }
  return fmt::format("({})-({:.17g})*({})", expr, s.sigma / 2.0, norm2);
}

std::optional<QuadraticModel> shift_quadratic(const QuadraticModel& q, const QuadShift& s) {
  const double coeff = q.coeff - s.sigma / 2.0;
  if (coeff == 0.0) return std::nullopt;
  // q|x-m|^2 - (s/2)|x-c|^2 = coeff|x-m'|^2 + const.
  Point center = (q.coeff * q.center - (s.sigma / 2.0) * s.center) / coeff;
  const double offset = q.offset + q.coeff * q.center.squared_norm() -
                        (s.sigma / 2.0) * s.center.squared_norm() - coeff * center.squared_norm();
  return QuadraticModel{coeff, std::move(center), offset};
}

}  // namespace

namespace detail {

ClosedFormProx quadratic_prox(const QuadraticModel& q) {
  return [q](double lambda, const Point& x) -> std::vector<Point> {
    const double denom = 1.0 + 2.0 * lambda * q.coeff;
    if (!(denom > 0.0)) return {};
    return {(x + (2.0 * lambda * q.coeff) * q.center) / denom};
  };
}

FeasibleFit fit_certificate_with_point(const Evaluator& evaluator, std::size_t dim,
                                       const Point& anchor) {
  struct Sample {
    double r2;
    double value;
    std::size_t index;
  };
  std::vector<Point> points;
  constexpr double kOuter = 20.0;
  if (dim == 1) {
    constexpr int n = 8000;
    for (int i = 0; i <= n; ++i) points.push_back(Point{anchor[0] - kOuter + 2.0 * kOuter * i / n});
  } else {
    for (const Point& u : halton_points(dim, 20000, 0)) {
      Point p = anchor;
      for (std::size_t d = 0; d < dim; ++d) p[d] += kOuter * (2.0 * u[d] - 1.0);
      points.push_back(std::move(p));
    }
  }
  points.push_back(anchor);

  std::vector<Sample> samples;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const ExtendedReal v = evaluator(points[i]);
    if (v.is_finite()) samples.push_back({squared_distance(points[i], anchor), v.value(), i});
  }
  if (samples.empty()) throw NoFeasiblePoint("no sampled point has a finite value");

  const auto nearest = std::min_element(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
    return a.r2 < b.r2;
  });

  auto box_inner = [&](std::size_t idx) {
    for (std::size_t d = 0; d < dim; ++d) {
      if (std::abs(points[idx][d] - anchor[d]) > 10.0) return false;
    }
    return true;
  };

  const double candidates[] = {0.0, -0.125, -0.25, -0.5, -1.0, -2.0, -4.0, -8.0, -16.0, -32.0, -64.0};
  ProxBoundCertificate cert;
  cert.anchor = anchor;
  cert.verified = false;
  for (double alpha : candidates) {
    double inner = std::numeric_limits<double>::infinity();
    double outer = std::numeric_limits<double>::infinity();
    for (const Sample& s : samples) {
      const double slack = s.value - alpha * s.r2;
      outer = std::min(outer, slack);
      if (box_inner(s.index)) inner = std::min(inner, slack);
    }
    if (!std::isfinite(inner)) inner = outer;
    cert.alpha = alpha;
    cert.beta = outer - 1e-3 * (1.0 + std::abs(outer));
    if (outer >= inner - 1e-9 * (1.0 + std::abs(inner))) break;
  }
  return {cert, points[nearest->index]};
}

}  // namespace detail

FunctionSpec quad_shift(const FunctionSpec& f, const QuadShift& s) {
  if (s.center.dim() != f.dim) throw DimensionMismatch(f.dim, s.center.dim());
  if (s.sigma == 0.0 || !std::isfinite(s.sigma)) throw InvalidArgument("quad_shift: sigma must be finite and nonzero");

  FunctionSpec psi;
  psi.name = fmt::format("shift({},{:.17g},[{}])", f.name, s.sigma, format_point(s.center));
  psi.dim = f.dim;
  psi.evaluator = [inner = f.evaluator, s](const Point& x) -> ExtendedReal {
    const ExtendedReal v = inner(x);
    if (v.is_infinite()) return v;
    return ExtendedReal(v.value() - 0.5 * s.sigma * squared_distance(x, s.center));
  };

  const ProxBoundCertificate& c = f.certificate;
  ProxBoundCertificate shifted = c;
  const double gap2 = squared_distance(c.anchor, s.center);
  if (gap2 == 0.0) {
    shifted.alpha = c.alpha - s.sigma / 2.0;
  } else if (s.sigma > 0.0) {
    // |x-c|^2 <= 2|x-a|^2 + 2|a-c|^2
    shifted.alpha = c.alpha - s.sigma;
    shifted.beta = c.beta - s.sigma * gap2;
    // Re-anchored at the center: for alpha < 0 use
    // |x-a|^2 <= (1+t)|x-c|^2 + (1+1/t)|a-c|^2.
    constexpr double t = 0.1;
    ProxBoundCertificate centered{c.alpha - s.sigma / 2.0, c.beta, s.center, c.verified};
    if (c.alpha < 0.0) {
      centered.alpha = c.alpha * (1.0 + t) - s.sigma / 2.0;
      centered.beta = c.beta + c.alpha * (1.0 + 1.0 / t) * gap2;
    }
    if (c.alpha >= 0.0) centered.alpha = -s.sigma / 2.0;
    if (centered.alpha > shifted.alpha) shifted = centered;
  } else {
    // |x-c|^2 >= |x-a|^2/2 - |a-c|^2
    shifted.alpha = c.alpha - s.sigma / 4.0;
    shifted.beta = c.beta + (s.sigma / 2.0) * gap2;
  }
  psi.certificate = shifted;

  if (f.quadratic) {
    psi.quadratic = shift_quadratic(*f.quadratic, s);
    if (psi.quadratic) psi.closed_form_prox = detail::quadratic_prox(*psi.quadratic);
  }
  psi.feasible_point = f.feasible_point;
  if (f.expression) psi.expression = shift_expression(*f.expression, s);
  psi.curvature_bound = f.curvature_bound + std::abs(s.sigma);
  psi.convex = f.convex && s.sigma < 0.0;
  std::size_t offset = 0;
  for (const FunctionSpec& part : f.parts) {
    Point sub = Point::zeros(part.dim);
    for (std::size_t d = 0; d < part.dim; ++d) sub[d] = s.center[offset + d];
    psi.parts.push_back(quad_shift(part, QuadShift{s.sigma, std::move(sub)}));
    offset += part.dim;
  }
  attach_certificate_cache(psi);
  return psi;
}

CertificateCheck check_certificate(const FunctionSpec& f, std::size_t samples, double radius,
                                   std::uint64_t seed) {
  const ProxBoundCertificate& c = f.certificate;
  if (c.anchor.dim() != f.dim) throw DimensionMismatch(f.dim, c.anchor.dim());
  CertificateCheck out;
  out.worst_violation = -std::numeric_limits<double>::infinity();

  auto visit = [&](const Point& x) {
    ++out.samples;
    const ExtendedReal v = f.evaluator(x);
    if (v.is_infinite()) return;
    const double bound = c.alpha * squared_distance(x, c.anchor) + c.beta;
    const double violation = bound - v.value();
    if (violation > out.worst_violation) {
      out.worst_violation = violation;
      out.witness = x;
    }
    if (violation > 1e-9 * (1.0 + std::abs(bound))) out.passed = false;
  };

  for (const Point& u : halton_points(f.dim, samples, seed)) {
    Point x = c.anchor;
    for (std::size_t d = 0; d < f.dim; ++d) x[d] += radius * (2.0 * u[d] - 1.0);
    visit(x);
  }
  if (f.dim == 1) {
    constexpr int n = 2000;
    for (int i = 0; i <= n; ++i) visit(Point{c.anchor[0] - radius + 2.0 * radius * i / n});
  } else if (f.dim == 2) {
    constexpr int n = 100;
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; j <= n; ++j) {
        visit(Point{c.anchor[0] - radius + 2.0 * radius * i / n, c.anchor[1] - radius + 2.0 * radius * j / n});
      }
    }
  }
  return out;
}

void attach_certificate_cache(FunctionSpec& f) {
  f.certificate_cache = f.certificate.verified ? nullptr : std::make_shared<CertificateCache>();
}

void ensure_certificate(const FunctionSpec& f) {
  if (f.certificate.verified) return;
  const CertificateCheck check = f.certificate_cache ? f.certificate_cache->get(f) : check_certificate(f);
  if (!check.passed) {
    throw CertificateViolation(fmt::format(
        "prox-bound certificate (alpha={}, beta={}) of {} fails at x=[{}] by {}", f.certificate.alpha,
        f.certificate.beta, f.name, check.witness ? format_point(*check.witness) : "", check.worst_violation));
  }
}

FunctionSpec certify(FunctionSpec f) {
  ensure_certificate(f);
  f.certificate.verified = true;
  f.certificate_cache.reset();
  return f;
}

ProxBoundCertificate fit_certificate(const Evaluator& evaluator, std::size_t dim, const Point& anchor) {
  return detail::fit_certificate_with_point(evaluator, dim, anchor).certificate;
}

}  // namespace moreau
