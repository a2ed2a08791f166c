#include "moreau/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "moreau/sampling.hpp"

namespace moreau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_radius(double epsilon, std::size_t samples) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw InvalidArgument("radius must be positive and finite");
  if (samples == 0) throw InvalidArgument("samples must be positive");
}

double center_value(const FunctionSpec& f, const Point& xbar) {
  const ExtendedReal v = evaluate(f, xbar);
  if (v.is_infinite()) throw InfiniteAtCenter(fmt::format("{} is +infinity at [{}]", f.name, format_point(xbar)));
  return v.value();
}

/// Worst violation of f(x) >= f(xbar) + (sigma/2)|x - xbar|^2 over the samples.
MinimizerCertificate growth_check(const FunctionSpec& f, const Point& xbar, double sigma, double epsilon,
                                  std::size_t samples, const VerifyConfig& vcfg) {
  check_radius(epsilon, samples);
  const double fx = center_value(f, xbar);
  MinimizerCertificate cert;
  cert.point = xbar;
  cert.epsilon = epsilon;
  cert.kind = sigma > 0.0 ? MinimizerKind::strong : MinimizerKind::local;
  cert.modulus = sigma;
  cert.worst_violation = -kInf;
  for (const Point& x : ball_samples(xbar, epsilon, samples, vcfg.seed)) {
    ++cert.evidence_samples;
    const ExtendedReal v = evaluate(f, x);
    if (v.is_infinite()) continue;
    const double violation = fx + 0.5 * sigma * squared_distance(x, xbar) - v.value();
    if (violation > cert.worst_violation) {
      cert.worst_violation = violation;
      cert.witness = x;
    }
  }
  cert.passed = cert.worst_violation <= vcfg.value_tol;
  if (cert.passed) cert.witness.reset();
  return cert;
}

/// inf over samples of 2(f(x) - f(xbar))/|x - xbar|^2 (not floored).
double ratio_inf(const FunctionSpec& f, const Point& xbar, double epsilon, std::size_t samples, const VerifyConfig& vcfg) {
  check_radius(epsilon, samples);
  const double fx = center_value(f, xbar);
  double best = kInf;
  for (const Point& x : ball_samples(xbar, epsilon, samples, vcfg.seed)) {
    const double d2 = squared_distance(x, xbar);
    if (d2 < vcfg.exclusion_radius * vcfg.exclusion_radius) continue;
    const ExtendedReal v = evaluate(f, x);
    if (v.is_infinite()) continue;
    best = std::min(best, 2.0 * (v.value() - fx) / d2);
  }
  return best;
}

void require_below_threshold(const FunctionSpec& f, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("lambda must be positive");
  const ExtendedReal threshold = prox_bound_threshold(f.certificate);
  if (!(ExtendedReal(lambda) < threshold)) throw ThresholdExceeded(lambda, threshold.value(), f.name);
}

ProxResult solve(const FunctionSpec& f, double lambda, const Point& x, const ProxSolveConfig& pcfg) {
  ProxResult r = prox_map(f, lambda, x, pcfg);
  if (r.diverged) throw ThresholdExceeded(lambda, prox_bound_threshold(f.certificate).value(), f.name);
  return r;
}

bool uses_closed_form(const FunctionSpec& f, const ProxSolveConfig& pcfg) {
  return pcfg.method != ProxMethod::grid && static_cast<bool>(f.closed_form_prox);
}

}  // namespace

void VerificationReport::conclude(double tolerance) {
  passed = worst_violation <= tolerance;
  params.emplace_back("tolerance", tolerance);
}

MinimizerCertificate verify_local_min(const FunctionSpec& f, const Point& xbar, double epsilon, std::size_t samples,
                                      const VerifyConfig& vcfg) {
  return growth_check(f, xbar, 0.0, epsilon, samples, vcfg);
}

MinimizerCertificate verify_strong_min(const FunctionSpec& f, const Point& xbar, double sigma, double epsilon,
                                       std::size_t samples, const VerifyConfig& vcfg) {
  if (!(sigma > 0.0)) throw InvalidArgument("strong minimizer modulus must be positive");
  return growth_check(f, xbar, sigma, epsilon, samples, vcfg);
}

MinimizerCertificate verify_local_min_shrinking(const FunctionSpec& f, const Point& xbar, double epsilon,
                                                std::size_t samples, const VerifyConfig& vcfg) {
  MinimizerCertificate cert;
  double radius = epsilon;
  for (int k = 0; k <= vcfg.max_shrinks; ++k, radius *= vcfg.shrink_factor) {
    cert = verify_local_min(f, xbar, radius, samples, vcfg);
    if (cert.passed) break;
  }
  return cert;
}

double estimate_strong_modulus(const FunctionSpec& f, const Point& xbar, double epsilon, std::size_t samples,
                               const VerifyConfig& vcfg) {
  const MinimizerCertificate cert = verify_local_min(f, xbar, epsilon, samples, vcfg);
  if (!cert.passed) {
    throw PreconditionFailed(fmt::format("[{}] is not a local minimizer of {} on radius {} (violation {})",
                                         format_point(xbar), f.name, epsilon, cert.worst_violation));
  }
  return std::max(0.0, ratio_inf(f, xbar, epsilon, samples, vcfg));
}

VerificationReport check_prox_fixed_point(const FunctionSpec& f, const Point& xbar, double lambda,
                                          const ProxSolveConfig& pcfg, const VerifyConfig& vcfg) {
  require_below_threshold(f, lambda);
  const ProxResult r = solve(f, lambda, xbar, pcfg);
  VerificationReport report;
  report.theorem_id = "prox-fixed-point";
  report.function = f.name;
  report.params = {{"lambda", lambda}, {"clusters", static_cast<double>(r.minimizers.size())}};
  double farthest = 0.0;
  for (const Point& p : r.minimizers) {
    const double d = distance(p, xbar);
    if (d >= farthest) {
      farthest = d;
      report.witness = p;
    }
  }
  const double tol = vcfg.fixed_point_tol;
  // Extra clusters count as violations of size tol each.
  report.worst_violation = farthest + static_cast<double>(r.minimizers.size() - 1) * tol;
  report.conclude(tol);
  if (report.passed) report.witness.reset();
  return report;
}

VerificationReport check_error_bound(const FunctionSpec& f, const Point& xbar, double lambda, double radius,
                                     std::size_t samples, const ProxSolveConfig& pcfg, const VerifyConfig& vcfg) {
  require_below_threshold(f, lambda);
  check_radius(radius, samples);
  const MinimizerCertificate local = verify_local_min_shrinking(f, xbar, radius, samples, vcfg);
  if (!local.passed) {
    throw PreconditionFailed(fmt::format("[{}] is not a local minimizer of {} (violation {})", format_point(xbar),
                                         f.name, local.worst_violation));
  }
  const double tol = uses_closed_form(f, pcfg) ? vcfg.bound_tol_closed : vcfg.bound_tol_grid;
  const double e_bar = solve(f, lambda, xbar, pcfg).envelope_value.value();

  VerificationReport report;
  report.theorem_id = "error-bound";
  report.function = f.name;
  report.certificates.emplace_back("local_min", local);
  double r = radius;
  int shrinks = 0;
  for (;; ++shrinks, r *= vcfg.shrink_factor) {
    double worst = -kInf;
    std::optional<Point> witness;
    std::vector<Point> points = ball_samples(xbar, r, samples, vcfg.seed);
    points.push_back(xbar);
    for (const Point& x : points) {
      const ProxResult pr = solve(f, lambda, x, pcfg);
      double d = kInf;
      for (const Point& p : pr.minimizers) d = std::min(d, distance(x, p));
      const double violation = d * d / (2.0 * lambda) - (pr.envelope_value.value() - e_bar);
      if (violation > worst) {
        worst = violation;
        witness = x;
      }
    }
    report.worst_violation = worst;
    report.witness = witness;
    if (worst <= tol || shrinks >= vcfg.max_shrinks) break;
  }
  report.params = {{"lambda", lambda}, {"radius", radius}, {"final_radius", r}, {"shrinks", static_cast<double>(shrinks)}};
  report.conclude(tol);
  if (report.passed) report.witness.reset();
  return report;
}

VerificationReport check_min_transfer(const FunctionSpec& f, const Point& xbar, double lambda, double epsilon,
                                      const ProxSolveConfig& pcfg, const VerifyConfig& vcfg) {
  require_below_threshold(f, lambda);
  const MinimizerCertificate of_f = verify_local_min_shrinking(f, xbar, epsilon, vcfg.samples, vcfg);
  const FunctionSpec env = envelope_function(f, lambda, pcfg);
  const MinimizerCertificate of_env = verify_local_min_shrinking(env, xbar, epsilon, vcfg.samples, vcfg);

  VerificationReport report;
  report.theorem_id = "min-transfer";
  report.function = f.name;
  report.params = {{"lambda", lambda},
                   {"epsilon", epsilon},
                   {"f_is_local_min", of_f.passed ? 1.0 : 0.0},
                   {"envelope_is_local_min", of_env.passed ? 1.0 : 0.0}};
  report.certificates = {{"f", of_f}, {"envelope", of_env}};
  report.worst_violation = of_f.passed == of_env.passed ? 0.0 : 1.0;
  if (!of_f.passed) report.witness = of_f.witness;
  else if (!of_env.passed) report.witness = of_env.witness;
  report.conclude(0.0);
  return report;
}

double modulus_transform(double sigma, double lambda) {
  if (!(sigma > 0.0) || !(lambda >= 0.0)) throw InvalidArgument("modulus_transform needs sigma > 0 and lambda >= 0");
  return sigma / (1.0 + sigma * lambda);
}

double modulus_transform_inv(double mu, double lambda) {
  if (!(mu > 0.0) || !(lambda >= 0.0) || !(mu * lambda < 1.0)) {
    throw InvalidArgument("modulus_transform_inv needs mu > 0, lambda >= 0 and mu * lambda < 1");
  }
  return mu / (1.0 - mu * lambda);
}

VerificationReport check_strong_transfer(const FunctionSpec& f, const Point& xbar, double sigma, double epsilon,
                                         double lambda, const ProxSolveConfig& pcfg, const VerifyConfig& vcfg) {
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  require_below_threshold(f, lambda);
  if (!(sigma * lambda < 1.0)) {
    throw PreconditionFailed(fmt::format("lambda = {} must be below 1/sigma = {}", lambda, 1.0 / sigma));
  }
  const double sigma_f = estimate_strong_modulus(f, xbar, epsilon, vcfg.samples, vcfg);
  if (sigma_f < sigma - vcfg.modulus_tol) {
    throw PreconditionFailed(fmt::format("estimated modulus {} of {} at [{}] is below sigma = {}", sigma_f, f.name,
                                         format_point(xbar), sigma));
  }

  const double target = modulus_transform(sigma, lambda);
  const FunctionSpec env = envelope_function(f, lambda, pcfg);
  double radius = epsilon * (1.0 + sigma * lambda);
  double estimate = -kInf;
  for (int k = 0; k <= vcfg.max_shrinks; ++k) {
    estimate = std::max(0.0, ratio_inf(env, xbar, radius, vcfg.samples, vcfg));
    if (estimate >= target - vcfg.modulus_tol || k == vcfg.max_shrinks) break;
    radius *= vcfg.shrink_factor;
  }

  const MinimizerCertificate psi_cert = verify_local_min(quad_shift(f, QuadShift{sigma, xbar}), xbar, epsilon, vcfg.samples, vcfg);

  VerificationReport report;
  report.theorem_id = "strong-transfer";
  report.function = f.name;
  report.params = {{"lambda", lambda},       {"sigma", sigma},
                   {"epsilon", epsilon},     {"radius", radius},
                   {"f_modulus", sigma_f},   {"target_modulus", target},
                   {"envelope_modulus", estimate}};
  report.certificates = {{"shifted_local_min", psi_cert}};
  report.worst_violation = target - estimate;
  if (!psi_cert.passed) {
    report.worst_violation = std::max(report.worst_violation, vcfg.modulus_tol + psi_cert.worst_violation);
    report.witness = psi_cert.witness;
    report.message = "shifted function is not locally minimized at xbar";
  }
  report.conclude(vcfg.modulus_tol);
  return report;
}

VerificationReport check_shift_equivalence(const FunctionSpec& f, const Point& xbar, double sigma, double epsilon,
                                           const VerifyConfig& vcfg) {
  const MinimizerCertificate strong = verify_strong_min(f, xbar, sigma, epsilon, vcfg.samples, vcfg);
  const MinimizerCertificate local = verify_local_min(quad_shift(f, QuadShift{sigma, xbar}), xbar, epsilon, vcfg.samples, vcfg);
  VerificationReport report;
  report.theorem_id = "shift-equivalence";
  report.function = f.name;
  report.params = {{"sigma", sigma},
                   {"epsilon", epsilon},
                   {"strong_min", strong.passed ? 1.0 : 0.0},
                   {"shifted_local_min", local.passed ? 1.0 : 0.0}};
  report.certificates = {{"strong", strong}, {"shifted", local}};
  report.worst_violation = strong.passed == local.passed ? 0.0 : 1.0;
  report.conclude(0.0);
  return report;
}

ShiftIdentityResult check_shift_identities(const FunctionSpec& f, std::size_t draws, std::uint64_t seed,
                                           const ProxSolveConfig& pcfg) {
  if (draws == 0) throw InvalidArgument("draws must be positive");
  SeededUniform rng(seed);
  const ExtendedReal threshold = prox_bound_threshold(f.certificate);

  ShiftIdentityResult out;
  out.via_shift.theorem_id = "shift-identity-envelope";
  out.via_f.theorem_id = "shift-identity-shifted";
  out.via_shift.function = out.via_f.function = f.name;
  out.via_shift.worst_violation = out.via_f.worst_violation = 0.0;
  const bool closed = uses_closed_form(f, pcfg) && f.quadratic.has_value();

  for (std::size_t k = 0; k < draws; ++k) {
    double sigma = 0.0;
    while (std::abs(sigma) < 1e-3) sigma = rng.next(-2.0, 2.0);
    double lambda_max = 1.0 / std::abs(sigma);
    if (threshold.is_finite()) lambda_max = std::min(lambda_max, threshold.value());
    lambda_max *= 0.5;
    const double lambda = rng.next(0.02, 1.0) * lambda_max;
    Point x = Point::zeros(f.dim), c = Point::zeros(f.dim);
    for (std::size_t d = 0; d < f.dim; ++d) x[d] = rng.next(-3.0, 3.0);
    for (std::size_t d = 0; d < f.dim; ++d) c[d] = rng.next(-3.0, 3.0);
    const QuadShift s{sigma, c};

    const double lhs15 = moreau_envelope(f, lambda, x, pcfg).value();
    const double rhs15 = envelope_via_shift(f, s, lambda, x, pcfg).value();
    const double diff15 = std::abs(lhs15 - rhs15);
    if (diff15 >= out.via_shift.worst_violation) {
      out.via_shift.worst_violation = diff15;
      out.via_shift.witness = x;
    }
    const double lhs16 = moreau_envelope(quad_shift(f, s), lambda, x, pcfg).value();
    const double rhs16 = shift_envelope_via_f(f, s, lambda, x, pcfg).value();
    const double diff16 = std::abs(lhs16 - rhs16);
    if (diff16 >= out.via_f.worst_violation) {
      out.via_f.worst_violation = diff16;
      out.via_f.witness = x;
    }
  }
  const double tol = closed ? 1e-6 : 1e-3;
  for (VerificationReport* r : {&out.via_shift, &out.via_f}) {
    r->params = {{"draws", static_cast<double>(draws)}, {"seed", static_cast<double>(seed)}};
    r->conclude(tol);
  }
  return out;
}

namespace {

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : "-inf";
}

nlohmann::ordered_json point_json(const std::optional<Point>& p) {
  if (!p) return nullptr;
  auto arr = nlohmann::ordered_json::array();
  for (double c : p->coords()) arr.push_back(c);
  return arr;
}

}  // namespace

std::string to_json(const VerificationReport& report) {
  nlohmann::ordered_json j;
  j["theorem_id"] = report.theorem_id;
  j["function"] = report.function;
  j["passed"] = report.passed;
  j["worst_violation"] = number(report.worst_violation);
  j["witness"] = point_json(report.witness);
  auto params = nlohmann::ordered_json::object();
  for (const auto& [name, value] : report.params) params[name] = number(value);
  j["params"] = params;
  auto certs = nlohmann::ordered_json::array();
  for (const auto& [role, c] : report.certificates) {
    nlohmann::ordered_json cj;
    cj["role"] = role;
    cj["point"] = point_json(c.point);
    cj["epsilon"] = c.epsilon;
    cj["kind"] = to_string(c.kind);
    cj["modulus"] = c.modulus;
    cj["evidence_samples"] = c.evidence_samples;
    cj["worst_violation"] = number(c.worst_violation);
    cj["witness"] = point_json(c.witness);
    cj["passed"] = c.passed;
    certs.push_back(cj);
  }
  j["certificates"] = certs;
  j["message"] = report.message;
  return j.dump(2) + "\n";
}

}  // namespace moreau
