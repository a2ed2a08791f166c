#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "moreau/extended_real.hpp"
#include "moreau/point.hpp"

namespace moreau {

/// Witness of prox-boundedness: f(x) >= alpha * |x - anchor|^2 + beta on dom f.
struct ProxBoundCertificate {
  double alpha = 0.0;
  double beta = 0.0;
  Point anchor;
  /// False for certificates fitted by sampling or supplied in a definition
  /// file; those are re-validated before any envelope computation.
  bool verified = true;
};

/// Threshold of prox-boundedness: +inf if alpha >= 0, else -1/(2 alpha).
ExtendedReal prox_bound_threshold(const ProxBoundCertificate& c);

enum class MinimizerKind { local, strong };

const char* to_string(MinimizerKind kind);

struct KnownMinimizer {
  Point point;
  MinimizerKind kind = MinimizerKind::local;
  double modulus = 0.0;  // 0 for local
  double epsilon = 0.0;
};

/// f(x) = coeff * |x - center|^2 + offset.
struct QuadraticModel {
  double coeff = 0.0;
  Point center;
  double offset = 0.0;
};

using Evaluator = std::function<ExtendedReal(const Point&)>;

/// Closed-form proximal mapping (lambda, x) -> argmin set. An empty result
/// means no closed form applies for these arguments.
using ClosedFormProx = std::function<std::vector<Point>(double lambda, const Point& x)>;

struct CertificateCheck {
  bool passed = true;
  double worst_violation = 0.0;  // max of (alpha|x-a|^2 + beta) - f(x)
  std::optional<Point> witness;
  std::size_t samples = 0;
};

/// Lazily computed sampled validation shared by copies of a FunctionSpec.
class CertificateCache;

/// An extended-real-valued l.s.c. function on R^dim with its prox-bound
/// certificate and optional metadata used by the solvers and verifiers.
struct FunctionSpec {
  std::string name;
  std::size_t dim = 1;
  Evaluator evaluator;
  ProxBoundCertificate certificate;
  ClosedFormProx closed_form_prox;
  std::vector<KnownMinimizer> known_minimizers;
  /// Points of dom f (or outside it) that are not local minimizers.
  std::vector<Point> non_minimizers;
  /// A point where f is finite, used to bound the envelope from above.
  std::optional<Point> feasible_point;
  /// The function written in the expression grammar, when expressible.
  std::optional<std::string> expression;
  std::optional<QuadraticModel> quadratic;
  /// Upper bound on the second derivative over the smooth pieces.
  double curvature_bound = 0.0;
  bool convex = false;
  /// When f(x) = f_1(x_1) + f_2(x_2) + ... over consecutive coordinate
  /// blocks, the pieces; prox and envelope solves split along them.
  std::vector<FunctionSpec> parts;

  std::shared_ptr<CertificateCache> certificate_cache;
};

/// Evaluates f at x. Throws DimensionMismatch when x.dim() != f.dim.
ExtendedReal evaluate(const FunctionSpec& f, const Point& x);

struct QuadShift {
  double sigma = 0.0;
  Point center;
};

/// psi(x) = f(x) - (sigma/2)|x - center|^2 with an updated certificate.
FunctionSpec quad_shift(const FunctionSpec& f, const QuadShift& s);

/// Samples >= `samples` points in the box of half-width `radius` around the
/// anchor (plus a uniform grid in 1D/2D) and checks the certificate bound.
CertificateCheck check_certificate(const FunctionSpec& f, std::size_t samples = 10000,
                                   double radius = 10.0, std::uint64_t seed = 0);

/// Runs check_certificate once per certificate (cached) when the certificate
/// is unverified. Throws CertificateViolation on failure.
void ensure_certificate(const FunctionSpec& f);

/// Returns a copy with the certificate validated and flagged verified.
FunctionSpec certify(FunctionSpec f);

/// Lower-quadratic fit by sampling around `anchor`; the result is unverified.
ProxBoundCertificate fit_certificate(const Evaluator& evaluator, std::size_t dim,
                                     const Point& anchor);

/// Attaches a fresh validation cache when the certificate is unverified.
void attach_certificate_cache(FunctionSpec& f);

}  // namespace moreau
