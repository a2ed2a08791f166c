#include <doctest.h>

#include <nlohmann/json.hpp>

#include "moreau/catalog.hpp"
#include "moreau/errors.hpp"
#include "moreau/sampling.hpp"
#include "moreau/verify.hpp"

using namespace moreau;

namespace {
ProxSolveConfig grid_cfg() {
  ProxSolveConfig cfg;
  cfg.method = ProxMethod::grid;
  return cfg;
}
}  // namespace

TEST_CASE("verify_local_min") {
  CHECK(verify_local_min(catalog::double_well(), Point{1.0}, 0.1, 64).passed);
  CHECK(verify_local_min(catalog::piecewise_min(), Point{2.0}, 0.3, 64).passed);
  const MinimizerCertificate bad = verify_local_min(catalog::cubic(), Point{0.0}, 0.1, 64);
  CHECK_FALSE(bad.passed);
  REQUIRE(bad.witness.has_value());
  CHECK((*bad.witness)[0] < 0.0);
  CHECK(bad.evidence_samples > 64);

  CHECK_THROWS_AS(verify_local_min(catalog::absolute(), Point{0.0}, 0.0, 64), InvalidArgument);
  CHECK_THROWS_AS(verify_local_min(catalog::absolute(), Point{0.0}, 0.1, 0), InvalidArgument);
  CHECK_THROWS_AS(verify_local_min(catalog::indicator(0.0, 1.0), Point{2.0}, 0.1, 64), InfiniteAtCenter);
}

TEST_CASE("a shrinking radius rescues an oversized neighbourhood") {
  const FunctionSpec f = catalog::piecewise_min();
  CHECK_FALSE(verify_local_min(f, Point{2.0}, 2.5, 64).passed);
  const MinimizerCertificate c = verify_local_min_shrinking(f, Point{2.0}, 2.5, 64);
  CHECK(c.passed);
  CHECK(c.epsilon < 2.5);
}

TEST_CASE("estimate_strong_modulus") {
  CHECK(estimate_strong_modulus(catalog::quadratic(1.0), Point{0.0}, 0.7, 64) == doctest::Approx(2.0));
  const double well = estimate_strong_modulus(catalog::double_well(), Point{1.0}, 0.1, 64);
  CHECK(well >= 6.1);
  CHECK(well <= 8.0);
  CHECK(well == doctest::Approx(7.22).epsilon(1e-3));
  CHECK(estimate_strong_modulus(catalog::absolute(), Point{0.0}, 0.1, 64) >= 20.0);
  CHECK_THROWS_AS(estimate_strong_modulus(catalog::cubic(), Point{0.0}, 0.1, 64), PreconditionFailed);
}

TEST_CASE("strong minimizer certificate") {
  CHECK(verify_strong_min(catalog::double_well(), Point{1.0}, 6.0, 0.1, 64).passed);
  CHECK_FALSE(verify_strong_min(catalog::double_well(), Point{1.0}, 9.0, 0.1, 64).passed);
  CHECK_THROWS_AS(verify_strong_min(catalog::double_well(), Point{1.0}, 0.0, 0.1, 64), InvalidArgument);
}

TEST_CASE("prox fixed points") {
  CHECK(check_prox_fixed_point(catalog::absolute(), Point{0.0}, 0.5).passed);
  CHECK(check_prox_fixed_point(catalog::piecewise_min(), Point{2.0}, 0.1).passed);
  CHECK(check_prox_fixed_point(catalog::piecewise_min(), Point{2.0}, 0.1, grid_cfg()).passed);
  const VerificationReport r = check_prox_fixed_point(catalog::quadratic(1.0), Point{1.0}, 0.1);
  CHECK_FALSE(r.passed);
  CHECK(r.worst_violation == doctest::Approx(1.0 - 1.0 / 1.2));
  // the hump of the double well has zero as a proximal subgradient
  CHECK(check_prox_fixed_point(catalog::double_well(), Point{0.0}, 0.1).passed);
  CHECK_FALSE(check_prox_fixed_point(catalog::double_well(), Point{0.0}, 0.5).passed);
  CHECK_THROWS_AS(check_prox_fixed_point(catalog::neg_quadratic(0.5), Point{0.0}, 1.0), ThresholdExceeded);
}

TEST_CASE("error bound") {
  const VerificationReport q = check_error_bound(catalog::quadratic(1.0), Point{0.0}, 0.5, 1.0, 64);
  CHECK(q.passed);
  CHECK(q.worst_violation <= 1e-6);
  const VerificationReport a = check_error_bound(catalog::absolute(), Point{0.0}, 1.0, 0.5, 64);
  CHECK(a.passed);
  // equality holds inside the quadratic region, so the worst violation is ~0
  CHECK(a.worst_violation == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(check_error_bound(catalog::piecewise_min(), Point{2.0}, 0.1, 0.3, 32, grid_cfg()).passed);
  CHECK_THROWS_AS(check_error_bound(catalog::quadratic(1.0), Point{0.5}, 0.1, 0.1, 32), PreconditionFailed);
}

TEST_CASE("minimizer transfer") {
  const VerificationReport r = check_min_transfer(catalog::piecewise_min(), Point{2.0}, 0.1, 0.2);
  CHECK(r.passed);
  REQUIRE(r.certificates.size() == 2);
  CHECK(r.certificates[0].second.passed);
  CHECK(r.certificates[1].second.passed);
  CHECK(check_min_transfer(catalog::double_well(), Point{-1.0}, 0.05, 0.1).passed);
  const VerificationReport neither = check_min_transfer(catalog::quadratic(1.0), Point{0.5}, 0.1, 0.1);
  CHECK(neither.passed);
  CHECK_FALSE(neither.certificates[0].second.passed);
  CHECK_FALSE(neither.certificates[1].second.passed);
}

TEST_CASE("modulus transform") {
  CHECK(modulus_transform(1.0, 0.5) == doctest::Approx(2.0 / 3.0));
  CHECK(modulus_transform(6.0, 0.1) == doctest::Approx(3.75));
  CHECK(modulus_transform(5.0, 0.0) == 5.0);
  CHECK_THROWS_AS(modulus_transform(0.0, 0.1), InvalidArgument);
  CHECK_THROWS_AS(modulus_transform_inv(2.0, 0.5), InvalidArgument);
  SeededUniform rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double sigma = rng.next(0.01, 10.0);
    const double lambda = rng.next(0.0, 1.0) / sigma;
    CHECK(modulus_transform_inv(modulus_transform(sigma, lambda), lambda) == doctest::Approx(sigma).epsilon(1e-12));
    CHECK(modulus_transform(sigma * 1.01, lambda) > modulus_transform(sigma, lambda));
    CHECK(modulus_transform(sigma, lambda * 1.01 + 1e-6) < modulus_transform(sigma, lambda));
  }
}

TEST_CASE("strong transfer") {
  const VerificationReport w = check_strong_transfer(catalog::double_well(), Point{1.0}, 6.0, 0.1, 0.1);
  CHECK(w.passed);
  CHECK(w.worst_violation <= 0.05);
  const VerificationReport q = check_strong_transfer(catalog::quadratic(1.0), Point{0.0}, 2.0, 0.5, 0.25);
  CHECK(q.passed);
  double estimate = 0.0;
  for (const auto& [name, value] : q.params)
    if (name == "envelope_modulus") estimate = value;
  CHECK(estimate == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(check_strong_transfer(catalog::abs_plus_quadratic(), Point{0.0}, 2.0, 0.2, 0.1, grid_cfg()).passed);
  CHECK_THROWS_AS(check_strong_transfer(catalog::double_well(), Point{1.0}, 12.0, 0.1, 0.05), PreconditionFailed);
  CHECK_THROWS_AS(check_strong_transfer(catalog::quadratic(1.0), Point{0.0}, 2.0, 0.5, 0.6), PreconditionFailed);
}

TEST_CASE("shift equivalence across the catalog") {
  for (const auto& f : catalog::default_matrix()) {
    for (const auto& m : f.known_minimizers) {
      CAPTURE(f.name);
      const double sigma = m.kind == MinimizerKind::strong ? m.modulus : 1.0;
      CHECK(check_shift_equivalence(f, m.point, sigma, m.epsilon).passed);
    }
  }
}

TEST_CASE("shift identity draws") {
  const ShiftIdentityResult r = check_shift_identities(catalog::quadratic(1.0), 20, 4);
  CHECK(r.via_shift.passed);
  CHECK(r.via_f.passed);
  CHECK(r.via_shift.worst_violation <= 1e-6);
  const ShiftIdentityResult g = check_shift_identities(catalog::double_well(), 10, 4);
  CHECK(g.via_shift.passed);
  CHECK(g.via_f.passed);
}

TEST_CASE("reports serialize to JSON") {
  const VerificationReport r = check_prox_fixed_point(catalog::quadratic(1.0), Point{1.0}, 0.1);
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["theorem_id"] == "prox-fixed-point");
  CHECK(j["passed"] == false);
  CHECK(j["worst_violation"].get<double>() == doctest::Approx(r.worst_violation));
  CHECK(j["witness"].is_array());
  CHECK(j["params"]["lambda"].get<double>() == 0.1);
  CHECK(j["params"].contains("tolerance"));
  CHECK(to_json(r) == to_json(r));
}
