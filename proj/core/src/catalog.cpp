#include "moreau/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "function_internal.hpp"

namespace moreau::catalog {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) { return fmt::format("{:.17g}", v); }

double soft_threshold(double x, double t) { return std::copysign(std::max(std::abs(x) - t, 0.0), x); }

std::vector<Point> points_1d(std::initializer_list<double> values) {
  std::vector<Point> out;
  for (double v : values) out.push_back(Point{v});
  return out;
}

/// Real roots of w^3 + p w + q = 0, polished by Newton steps.
std::vector<double> depressed_cubic_roots(double p, double q) {
  std::vector<double> roots;
  const double disc = -(4.0 * p * p * p + 27.0 * q * q);
  if (disc > 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0));
  } else {
    const double s = std::sqrt(std::max(q * q / 4.0 + p * p * p / 27.0, 0.0));
    roots.push_back(std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s));
  }
  for (double& w : roots) {
    for (int it = 0; it < 4; ++it) {
      const double h = w * w * w + p * w + q;
      const double dh = 3.0 * w * w + p;
      if (dh == 0.0) break;
      w -= h / dh;
    }
  }
  return roots;
}

/// argmin set among candidate points of the prox objective.
std::vector<Point> best_of(const FunctionSpec& f, double lambda, const Point& x, std::vector<Point> cands) {
  std::vector<std::pair<double, Point>> scored;
  double best = kInf;
  for (Point& c : cands) {
    const double v = f.evaluator(c).value() + squared_distance(c, x) / (2.0 * lambda);
    best = std::min(best, v);
    scored.emplace_back(v, std::move(c));
  }
  std::vector<Point> out;
  for (auto& [v, p] : scored) {
    if (v <= best + 1e-12 * (1.0 + std::abs(best)) &&
        std::none_of(out.begin(), out.end(), [&](const Point& q) { return distance(q, p) < 1e-12; })) {
      out.push_back(std::move(p));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

FunctionSpec base_1d(std::string name, Evaluator eval, double alpha, double beta, double anchor) {
  FunctionSpec f;
  f.name = std::move(name);
  f.dim = 1;
  f.evaluator = std::move(eval);
  f.certificate = ProxBoundCertificate{alpha, beta, Point{anchor}, true};
  f.feasible_point = Point{anchor};
  return f;
}

std::vector<double> parse_args(const std::string& text) {
  std::vector<double> out;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v)) throw InvalidArgument("bad catalog parameter '" + token + "'");
    out.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',') {
      flush();
    } else if (!std::isspace(static_cast<unsigned char>(c))) {
      token += c;
    }
  }
  flush();
  return out;
}

std::string rename_x1(const std::string& expr, const std::string& to) {
  std::string out;
  for (std::size_t i = 0; i < expr.size(); ++i) {
    if (expr.compare(i, 2, "x1") == 0 && (i + 2 >= expr.size() || !std::isdigit(static_cast<unsigned char>(expr[i + 2])))) {
      out += to;
      ++i;
    } else {
      out += expr[i];
    }
  }
  return out;
}

}  // namespace

FunctionSpec quadratic(double a) {
  if (!(a > 0.0)) throw InvalidArgument("quad: coefficient must be positive");
  FunctionSpec f = base_1d(fmt::format("quad({})", a), [a](const Point& x) { return ExtendedReal(a * x[0] * x[0]); },
                           a, 0.0, 0.0);
  f.quadratic = QuadraticModel{a, Point{0.0}, 0.0};
  f.closed_form_prox = detail::quadratic_prox(*f.quadratic);
  f.known_minimizers = {{Point{0.0}, MinimizerKind::strong, 2.0 * a, 1.0}};
  f.non_minimizers = points_1d({-1.5, -1.0, 1.0, 1.5, 2.0});
  f.expression = num(a) + "*x1^2";
  f.curvature_bound = 2.0 * a;
  f.convex = true;
  return f;
}

FunctionSpec absolute() {
  FunctionSpec f = base_1d("abs", [](const Point& x) { return ExtendedReal(std::abs(x[0])); }, 0.0, 0.0, 0.0);
  f.closed_form_prox = [](double lambda, const Point& x) { return std::vector<Point>{Point{soft_threshold(x[0], lambda)}}; };
  f.known_minimizers = {{Point{0.0}, MinimizerKind::strong, 2.0, 0.5}};
  f.non_minimizers = points_1d({-2.0, -1.0, 0.5, 1.0, 2.0});
  f.expression = "abs(x1)";
  f.convex = true;
  return f;
}

FunctionSpec huber(double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("huber: delta must be positive");
  auto eval = [delta](const Point& x) {
    const double a = std::abs(x[0]);
    return ExtendedReal(a <= delta ? 0.5 * a * a : delta * (a - 0.5 * delta));
  };
  FunctionSpec f = base_1d(fmt::format("huber({})", delta), eval, 0.0, 0.0, 0.0);
  f.closed_form_prox = [delta](double lambda, const Point& x) {
    const double v = x[0];
    if (std::abs(v) <= delta * (1.0 + lambda)) return std::vector<Point>{Point{v / (1.0 + lambda)}};
    return std::vector<Point>{Point{v - lambda * delta * (v > 0 ? 1.0 : -1.0)}};
  };
  f.known_minimizers = {{Point{0.0}, MinimizerKind::strong, 1.0, delta}};
  f.non_minimizers = points_1d({-2.0, -1.0, 0.5, 1.0, 2.0});
  f.expression = fmt::format("{}*abs(x1)-{}+max({}-abs(x1),0)^2/2", num(delta), num(delta * delta / 2.0), num(delta));
  f.curvature_bound = 1.0;
  f.convex = true;
  return f;
}

FunctionSpec indicator(double lo, double hi) {
  if (!(lo <= hi)) throw InvalidArgument("indicator: empty interval");
  const double mid = 0.5 * (lo + hi);
  auto eval = [lo, hi](const Point& x) { return x[0] >= lo && x[0] <= hi ? ExtendedReal(0.0) : ExtendedReal::infinity(); };
  FunctionSpec f = base_1d(fmt::format("indicator[{},{}]", lo, hi), eval, 0.0, 0.0, mid);
  f.closed_form_prox = [lo, hi](double, const Point& x) { return std::vector<Point>{Point{std::clamp(x[0], lo, hi)}}; };
  const double eps = hi > lo ? 0.2 * (hi - lo) : 0.1;
  f.known_minimizers = {{Point{mid}, MinimizerKind::local, 0.0, eps}};
  f.non_minimizers = points_1d({lo - 1.0, lo - 0.5, hi + 0.5, hi + 1.0, hi + 2.0});
  f.expression = fmt::format("ind({},{})", num(lo), num(hi));
  f.convex = true;
  return f;
}

FunctionSpec neg_quadratic(double a) {
  if (!(a > 0.0)) throw InvalidArgument("neg_quad: coefficient must be positive");
  FunctionSpec f = base_1d(fmt::format("neg_quad({})", a), [a](const Point& x) { return ExtendedReal(-a * x[0] * x[0]); },
                           -a, 0.0, 0.0);
  f.quadratic = QuadraticModel{-a, Point{0.0}, 0.0};
  f.closed_form_prox = detail::quadratic_prox(*f.quadratic);
  f.non_minimizers = points_1d({-2.0, -1.0, 0.5, 1.0, 2.0});
  f.expression = "-" + num(a) + "*x1^2";
  f.curvature_bound = 2.0 * a;
  return f;
}

FunctionSpec double_well() {
  auto eval = [](const Point& x) {
    const double s = x[0] * x[0] - 1.0;
    return ExtendedReal(s * s);
  };
  FunctionSpec f = base_1d("double_well", eval, 0.0, 0.0, 0.0);
  // Stationarity: 4w^3 + (1/lambda - 4) w - x/lambda = 0.
  f.closed_form_prox = [self = f](double lambda, const Point& x) {
    const double p = (1.0 / lambda - 4.0) / 4.0;
    const double q = -x[0] / (4.0 * lambda);
    std::vector<Point> cands;
    for (double w : depressed_cubic_roots(p, q)) cands.push_back(Point{w});
    return best_of(self, lambda, x, std::move(cands));
  };
  f.known_minimizers = {{Point{-1.0}, MinimizerKind::strong, 6.0, 0.1}, {Point{1.0}, MinimizerKind::strong, 6.0, 0.1}};
  f.non_minimizers = points_1d({-1.5, -0.5, 0.5, 1.5, 2.0});
  f.expression = "(x1^2-1)^2";
  f.curvature_bound = 296.0;  // sup |12 x^2 - 4| on |x| <= 5
  return f;
}

FunctionSpec piecewise_min() {
  auto eval = [](const Point& x) {
    const double v = x[0];
    return ExtendedReal(std::min(v * v, (v - 2.0) * (v - 2.0) + 0.5));
  };
  FunctionSpec f = base_1d("piecewise_min", eval, 0.0, 0.0, 0.0);
  f.closed_form_prox = [self = f](double lambda, const Point& x) {
    const double denom = 1.0 + 2.0 * lambda;
    return best_of(self, lambda, x, {Point{x[0] / denom}, Point{(x[0] + 4.0 * lambda) / denom}});
  };
  f.known_minimizers = {{Point{0.0}, MinimizerKind::strong, 2.0, 0.5}, {Point{2.0}, MinimizerKind::strong, 2.0, 0.3}};
  f.non_minimizers = points_1d({-1.0, 0.5, 1.5, 2.5, 3.0});
  f.expression = "min(x1^2,(x1-2)^2+0.5)";
  f.curvature_bound = 2.0;
  return f;
}

FunctionSpec abs_plus_quadratic() {
  FunctionSpec f = base_1d("abs_plus_quad", [](const Point& x) { return ExtendedReal(std::abs(x[0]) + x[0] * x[0]); },
                           1.0, 0.0, 0.0);
  f.closed_form_prox = [](double lambda, const Point& x) {
    return std::vector<Point>{Point{soft_threshold(x[0], lambda) / (1.0 + 2.0 * lambda)}};
  };
  f.known_minimizers = {{Point{0.0}, MinimizerKind::strong, 2.0, 0.5}};
  f.non_minimizers = points_1d({-2.0, -1.0, 0.5, 1.0, 2.0});
  f.expression = "abs(x1)+x1^2";
  f.curvature_bound = 2.0;
  f.convex = true;
  return f;
}

FunctionSpec cubic() {
  FunctionSpec f = base_1d("cubic", [](const Point& x) { return ExtendedReal(x[0] * x[0] * x[0]); }, -15.0, 0.0, 0.0);
  // Sampled validation on the radius-10 box accepts this certificate; x^3 is
  // not prox-bounded globally. Used to inject a false minimizer claim.
  f.certificate.verified = false;
  f.known_minimizers = {{Point{0.0}, MinimizerKind::local, 0.0, 0.1}};
  f.non_minimizers = points_1d({-1.0, -0.5, 0.5, 1.0, 2.0});
  f.expression = "x1^3";
  attach_certificate_cache(f);
  return f;
}

FunctionSpec separable_sum(const FunctionSpec& f1, const FunctionSpec& f2) {
  if (f1.dim != 1 || f2.dim != 1) throw InvalidArgument("separable_sum: both parts must be 1D");
  FunctionSpec f;
  f.name = fmt::format("sum({},{})", f1.name, f2.name);
  f.dim = 2;
  f.evaluator = [e1 = f1.evaluator, e2 = f2.evaluator](const Point& x) {
    return e1(Point{x[0]}) + e2(Point{x[1]});
  };
  f.certificate = ProxBoundCertificate{std::min(f1.certificate.alpha, f2.certificate.alpha),
                                       f1.certificate.beta + f2.certificate.beta,
                                       Point{f1.certificate.anchor[0], f2.certificate.anchor[0]},
                                       f1.certificate.verified && f2.certificate.verified};
  if (f1.closed_form_prox && f2.closed_form_prox) {
    f.closed_form_prox = [p1 = f1.closed_form_prox, p2 = f2.closed_form_prox](double lambda, const Point& x) {
      std::vector<Point> out;
      const auto a = p1(lambda, Point{x[0]});
      const auto b = p2(lambda, Point{x[1]});
      for (const Point& u : a) {
        for (const Point& v : b) out.push_back(Point{u[0], v[0]});
      }
      std::sort(out.begin(), out.end());
      return out;
    };
  }
  for (const KnownMinimizer& m1 : f1.known_minimizers) {
    for (const KnownMinimizer& m2 : f2.known_minimizers) {
      const bool strong = m1.kind == MinimizerKind::strong && m2.kind == MinimizerKind::strong;
      f.known_minimizers.push_back({Point{m1.point[0], m2.point[0]},
                                    strong ? MinimizerKind::strong : MinimizerKind::local,
                                    strong ? std::min(m1.modulus, m2.modulus) : 0.0, std::min(m1.epsilon, m2.epsilon)});
    }
  }
  if (!f2.known_minimizers.empty()) {
    const double m2 = f2.known_minimizers.front().point[0];
    for (const Point& nm : f1.non_minimizers) f.non_minimizers.push_back(Point{nm[0], m2});
  }
  if (f1.feasible_point && f2.feasible_point) f.feasible_point = Point{(*f1.feasible_point)[0], (*f2.feasible_point)[0]};
  if (f1.expression && f2.expression) {
    f.expression = "(" + *f1.expression + ")+(" + rename_x1(*f2.expression, "x2") + ")";
  }
  f.curvature_bound = std::max(f1.curvature_bound, f2.curvature_bound);
  f.convex = f1.convex && f2.convex;
  f.parts = {f1, f2};
  attach_certificate_cache(f);
  return f;
}

FunctionSpec by_name(const std::string& spec) {
  std::string name = spec;
  std::vector<double> args;
  const auto open = spec.find_first_of("([");
  if (open != std::string::npos) {
    const char close = spec[open] == '(' ? ')' : ']';
    if (spec.back() != close) throw InvalidArgument("malformed catalog name '" + spec + "'");
    name = spec.substr(0, open);
    args = parse_args(spec.substr(open + 1, spec.size() - open - 2));
  }
  auto arg = [&](std::size_t i, double fallback) { return i < args.size() ? args[i] : fallback; };
  auto expect_args = [&](std::size_t max) {
    if (args.size() > max) throw InvalidArgument("too many parameters for '" + name + "'");
  };

  if (name == "quad") {
    expect_args(1);
    return quadratic(arg(0, 1.0));
  }
  if (name == "abs") {
    expect_args(0);
    return absolute();
  }
  if (name == "huber") {
    expect_args(1);
    return huber(arg(0, 1.0));
  }
  if (name == "indicator") {
    expect_args(2);
    return indicator(arg(0, 0.0), arg(1, 1.0));
  }
  if (name == "neg_quad") {
    expect_args(1);
    return neg_quadratic(arg(0, 0.5));
  }
  if (name == "double_well") {
    expect_args(0);
    return double_well();
  }
  if (name == "piecewise_min") {
    expect_args(0);
    return piecewise_min();
  }
  if (name == "abs_plus_quad") {
    expect_args(0);
    return abs_plus_quadratic();
  }
  if (name == "cubic") {
    expect_args(0);
    return cubic();
  }
  if (name == "quad_abs_2d") {
    expect_args(0);
    FunctionSpec f = separable_sum(quadratic(1.0), absolute());
    f.name = "quad_abs_2d";
    return f;
  }
  if (name == "double_well_quad_2d") {
    expect_args(0);
    FunctionSpec f = separable_sum(double_well(), quadratic(1.0));
    f.name = "double_well_quad_2d";
    return f;
  }
  throw InvalidArgument("unknown catalog function '" + spec + "'");
}

std::vector<std::string> names() {
  return {"quad", "abs", "huber", "indicator", "neg_quad", "double_well", "piecewise_min",
          "abs_plus_quad", "cubic", "quad_abs_2d", "double_well_quad_2d"};
}

std::vector<FunctionSpec> default_matrix() {
  return {quadratic(1.0), absolute(), huber(1.0), indicator(0.0, 1.0), neg_quadratic(0.5),
          double_well(), piecewise_min(), abs_plus_quadratic(), by_name("quad_abs_2d"),
          by_name("double_well_quad_2d")};
}

}  // namespace moreau::catalog
