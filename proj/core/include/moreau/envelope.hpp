#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "moreau/extended_real.hpp"
#include "moreau/function.hpp"
#include "moreau/point.hpp"

namespace moreau {

enum class ProxMethod {
  automatic,    // closed form when the function has one, grid otherwise
  grid,         // always the certified grid oracle
  closed_form,  // closed form only; InvalidArgument when absent
};

/// Solver settings for the envelope subproblem
///   inf_w f(w) + |w - x|^2 / (2 lambda).
struct ProxSolveConfig {
  /// Grid step; defaults to 1e-3 in 1D and 1e-2 per axis otherwise.
  std::optional<double> grid_step;
  int refine_iters = 60;
  double value_tol = 1e-9;
  /// Defaults to 10 * grid step.
  std::optional<double> cluster_radius;
  /// Auxiliary lambda1 in (lambda, lambda_phi); defaults to the midpoint, or
  /// 2 lambda when lambda_phi is infinite.
  std::optional<double> lambda1;
  ProxMethod method = ProxMethod::automatic;

  /// Grid minima whose value is within this of the best grid value are refined.
  double candidate_slack = 1e-2;
  std::size_t max_candidates = 64;

  int max_expansions = 6;
  double divergence_guard = -1e12;
  /// Points per axis of the coarse divergence probe.
  std::size_t probe_points_1d = 4001;
  std::size_t probe_points_nd = 201;

  double step_for(std::size_t dim) const;
  double cluster_radius_for(std::size_t dim) const;
  double lambda1_for(double lambda, ExtendedReal threshold) const;
};

struct ProxResult {
  ExtendedReal envelope_value;
  /// Cluster representatives, sorted lexicographically.
  std::vector<Point> minimizers;
  /// The objective decreases without bound (lambda >= lambda_phi).
  bool diverged = false;
  double radius_used = 0.0;
  bool closed_form = false;
};

/// Radius R with P_lambda f(x) inside the closed ball B_R(x), from the
/// certificate lower bound and an upper bound U on e_lambda f(x).
/// Throws ThresholdExceeded or NoFeasiblePoint.
double search_radius(const FunctionSpec& f, double lambda, const Point& x,
                     const ProxSolveConfig& cfg = {});

ProxResult prox_map(const FunctionSpec& f, double lambda, const Point& x,
                    const ProxSolveConfig& cfg = {});

/// e_lambda f(x). Throws ThresholdExceeded when the solve diverges.
ExtendedReal moreau_envelope(const FunctionSpec& f, double lambda, const Point& x,
                             const ProxSolveConfig& cfg = {});

/// e_lambda f(x) computed through the shifted function psi:
///   e_{lambda/(1+s lambda)} psi((x + s lambda c)/(1 + s lambda))
///     + s/(2(1 + s lambda)) |x - c|^2.
ExtendedReal envelope_via_shift(const FunctionSpec& f, const QuadShift& s, double lambda,
                                const Point& x, const ProxSolveConfig& cfg = {});

/// e_lambda psi(x) computed through f:
///   e_{lambda/(1-s lambda)} f((x - s lambda c)/(1 - s lambda))
///     - s/(2(1 - s lambda)) |x - c|^2.
ExtendedReal shift_envelope_via_f(const FunctionSpec& f, const QuadShift& s, double lambda,
                                  const Point& x, const ProxSolveConfig& cfg = {});

/// (x - p)/lambda for the unique prox cluster p. Throws MultivaluedProx.
Point envelope_gradient(const FunctionSpec& f, double lambda, const Point& x,
                        const ProxSolveConfig& cfg = {});

/// The envelope x -> e_lambda f(x) as a FunctionSpec, so the minimizer
/// verifiers can run on it. Requires lambda < lambda_phi.
FunctionSpec envelope_function(const FunctionSpec& f, double lambda,
                               const ProxSolveConfig& cfg = {});

}  // namespace moreau
