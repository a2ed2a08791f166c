#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "moreau/envelope.hpp"
#include "moreau/function.hpp"

namespace moreau {

struct MinimizerCertificate {
  Point point;
  double epsilon = 0.0;
  MinimizerKind kind = MinimizerKind::local;
  double modulus = 0.0;
  std::size_t evidence_samples = 0;
  /// max over samples of the growth-condition violation; <= tol passes.
  double worst_violation = 0.0;
  std::optional<Point> witness;
  bool passed = false;
};

struct VerificationReport {
  std::string theorem_id;
  std::string function;
  bool passed = false;
  double worst_violation = 0.0;
  std::optional<Point> witness;
  /// Ordered (name, value) record: lambda, sigma, epsilon, tolerance, ...
  std::vector<std::pair<std::string, double>> params;
  std::vector<std::pair<std::string, MinimizerCertificate>> certificates;
  std::string message;

  /// Sets passed from worst_violation <= tolerance.
  void conclude(double tolerance);
};

struct VerifyConfig {
  std::size_t samples = 64;
  double value_tol = 1e-9;
  /// Error-bound tolerance; closed-form solves use the tighter value.
  double bound_tol_closed = 1e-6;
  double bound_tol_grid = 1e-3;
  double modulus_tol = 0.05;
  double shrink_factor = 0.5;
  int max_shrinks = 5;
  double exclusion_radius = 1e-6;
  double fixed_point_tol = 1e-6;
  std::uint64_t seed = 0;
};

/// Checks f(x) >= f(xbar) on sampled points of the open ball B_eps(xbar).
MinimizerCertificate verify_local_min(const FunctionSpec& f, const Point& xbar, double epsilon,
                                      std::size_t samples, const VerifyConfig& vcfg = {});

/// Checks f(x) >= f(xbar) + (sigma/2)|x - xbar|^2 on the same samples.
MinimizerCertificate verify_strong_min(const FunctionSpec& f, const Point& xbar, double sigma,
                                       double epsilon, std::size_t samples,
                                       const VerifyConfig& vcfg = {});

/// verify_local_min on eps, eps/2, ... (max_shrinks times); returns the first
/// passing certificate or the last failing one.
MinimizerCertificate verify_local_min_shrinking(const FunctionSpec& f, const Point& xbar,
                                                double epsilon, std::size_t samples,
                                                const VerifyConfig& vcfg = {});

/// inf over sampled x of 2(f(x) - f(xbar))/|x - xbar|^2, floored at 0.
/// Requires verify_local_min to pass (PreconditionFailed otherwise).
double estimate_strong_modulus(const FunctionSpec& f, const Point& xbar, double epsilon,
                               std::size_t samples, const VerifyConfig& vcfg = {});

VerificationReport check_prox_fixed_point(const FunctionSpec& f, const Point& xbar, double lambda,
                                          const ProxSolveConfig& pcfg = {},
                                          const VerifyConfig& vcfg = {});

VerificationReport check_error_bound(const FunctionSpec& f, const Point& xbar, double lambda,
                                     double radius, std::size_t samples,
                                     const ProxSolveConfig& pcfg = {},
                                     const VerifyConfig& vcfg = {});

VerificationReport check_min_transfer(const FunctionSpec& f, const Point& xbar, double lambda,
                                      double epsilon, const ProxSolveConfig& pcfg = {},
                                      const VerifyConfig& vcfg = {});

double modulus_transform(double sigma, double lambda);
double modulus_transform_inv(double mu, double lambda);

VerificationReport check_strong_transfer(const FunctionSpec& f, const Point& xbar, double sigma,
                                         double epsilon, double lambda,
                                         const ProxSolveConfig& pcfg = {},
                                         const VerifyConfig& vcfg = {});

/// Strong-minimizer certificate of (f, sigma) at xbar against the local-min
/// certificate of quad_shift(f, sigma, xbar); passes when the verdicts agree.
VerificationReport check_shift_equivalence(const FunctionSpec& f, const Point& xbar, double sigma,
                                           double epsilon, const VerifyConfig& vcfg = {});

/// Random draws of the two shift identities over valid (sigma, lambda, x, c).
struct ShiftIdentityResult {
  VerificationReport via_shift;  // e_lambda f against its psi-route
  VerificationReport via_f;      // e_lambda psi against its f-route
};
ShiftIdentityResult check_shift_identities(const FunctionSpec& f, std::size_t draws,
                                           std::uint64_t seed, const ProxSolveConfig& pcfg = {});

/// JSON document with fields theorem_id, passed, worst_violation, witness,
/// params (plus function, message and certificates).
std::string to_json(const VerificationReport& report);

}  // namespace moreau
