// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "commands.hpp"
#include "moreau/catalog.hpp"
#include "moreau/errors.hpp"
#include "moreau/prox_opt.hpp"
#include "moreau/sampling.hpp"
#include "moreau/verify.hpp"
#include "oracles.hpp"

using namespace moreau;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;
};

ProxSolveConfig with_method(ProxMethod m) {
  ProxSolveConfig cfg;
  cfg.method = m;
  return cfg;
}

const ProxSolveConfig kAuto = with_method(ProxMethod::automatic);
const ProxSolveConfig kGrid = with_method(ProxMethod::grid);

std::vector<double> lambda_matrix(const FunctionSpec& f) {
  const ExtendedReal thr = prox_bound_threshold(f.certificate);
  return {0.01, 0.1, 0.5 * (thr.is_finite() ? std::min(thr.value(), 1.0) : 1.0)};
}

double param(const VerificationReport& r, const std::string& name) {
  for (const auto& [k, v] : r.params)
    if (k == name) return v;
  return std::nan("");
}

// 1. Shift identities over random draws, closed form and grid.
Outcome shift_identities() {
  Outcome o;
  std::size_t draws = 0;
  double worst_closed = 0.0, worst_grid = 0.0;
  std::uint64_t seed = 100;
  for (const FunctionSpec& f : catalog::default_matrix()) {
    for (const ProxSolveConfig* cfg : {&kAuto, &kGrid}) {
      const ShiftIdentityResult r = check_shift_identities(f, 50, seed++, *cfg);
      draws += 50;
      for (const VerificationReport* rep : {&r.via_shift, &r.via_f}) {
        o.passed = o.passed && rep->passed;
        const double tol = param(*rep, "tolerance");
        double& worst = tol < 1e-4 ? worst_closed : worst_grid;
        worst = std::max(worst, rep->worst_violation);
      }
    }
  }
  o.passed = o.passed && draws >= 200;
  o.detail = fmt::format("{} draws x 2 identities; worst {:.2g} (closed-form, tol 1e-6), {:.2g} (grid, tol 1e-3)", draws,
                         worst_closed, worst_grid);
  return o;
}

// 2. Minimizer transfer on every (f, known minimizer, lambda).
Outcome min_transfer() {
  Outcome o;
  std::size_t runs = 0, failures = 0;
  bool saw_nonglobal = false, saw_wells = false;
  for (const FunctionSpec& f : catalog::default_matrix()) {
    for (const KnownMinimizer& m : f.known_minimizers) {
      if (f.name == "piecewise_min" && m.point == Point{2.0}) saw_nonglobal = true;
      if (f.name == "double_well" && m.point == Point{-1.0}) saw_wells = true;
      for (double lambda : lambda_matrix(f)) {
        for (const ProxSolveConfig* cfg : {&kAuto, &kGrid}) {
          const VerificationReport r = check_min_transfer(f, m.point, lambda, m.epsilon, *cfg);
          ++runs;
          // known minimizers: both verdicts must be positive, not merely equal
          const bool ok = r.passed && r.certificates[0].second.passed && r.certificates[1].second.passed;
          if (!ok) {
            ++failures;
            o.detail += fmt::format(" [fail {} at {} lambda {}]", f.name, format_point(m.point), lambda);
          }
        }
      }
    }
  }
  o.passed = failures == 0 && saw_nonglobal && saw_wells;
  o.detail = fmt::format("{} runs (closed-form and grid), {} failures", runs, failures) + o.detail;
  return o;
}

// 3. Error bound on the same matrix; equality at the minimizer itself.
Outcome error_bound() {
  Outcome o;
  std::size_t runs = 0, failures = 0;
  double worst_grid = -1e300, worst_at_center = 0.0;
  int max_shrinks = 0;
  for (const FunctionSpec& f : catalog::default_matrix()) {
    for (const KnownMinimizer& m : f.known_minimizers) {
      for (double lambda : lambda_matrix(f)) {
        for (const ProxSolveConfig* cfg : {&kAuto, &kGrid}) {
          const VerificationReport r = check_error_bound(f, m.point, lambda, m.epsilon, 64, *cfg);
          ++runs;
          if (!r.passed) ++failures;
          if (cfg == &kGrid) worst_grid = std::max(worst_grid, r.worst_violation);
          max_shrinks = std::max(max_shrinks, static_cast<int>(param(r, "shrinks")));
          const ProxResult at = prox_map(f, lambda, m.point, *cfg);
          double d = 1e300;
          for (const Point& p : at.minimizers) d = std::min(d, distance(p, m.point));
          worst_at_center = std::max(worst_at_center, d * d / (2.0 * lambda));
        }
      }
    }
  }
  o.passed = failures == 0 && worst_grid <= 1e-3 && max_shrinks <= 5 && worst_at_center <= 1e-12;
  o.detail = fmt::format("{} runs, {} failures; worst grid violation {:.2g} (tol 1e-3), max shrinks {}, at x = xbar {:.2g}",
                         runs, failures, worst_grid, max_shrinks, worst_at_center);
  return o;
}

// 4. Strong modulus transfer.
Outcome strong_modulus() {
  Outcome o;
  double well_auto = 0.0, well_grid = 0.0;
  {
    const VerificationReport a = check_strong_transfer(catalog::double_well(), Point{1.0}, 6.0, 0.1, 0.1, kAuto);
    const VerificationReport g = check_strong_transfer(catalog::double_well(), Point{1.0}, 6.0, 0.1, 0.1, kGrid);
    well_auto = param(a, "envelope_modulus");
    well_grid = param(g, "envelope_modulus");
    o.passed = a.passed && g.passed && well_auto >= 3.75 - 0.05 && well_grid >= 3.75 - 0.05;
  }
  const VerificationReport q = check_strong_transfer(catalog::quadratic(1.0), Point{0.0}, 2.0, 0.5, 0.25, kAuto);
  const double quad = param(q, "envelope_modulus");
  const double target = modulus_transform(2.0, 0.25);
  o.passed = o.passed && q.passed && std::abs(quad - 4.0 / 3.0) <= 1e-6 && std::abs(target - 4.0 / 3.0) <= 1e-15;
  o.detail = fmt::format("double well modulus {:.6g} (closed-form), {:.6g} (grid) >= 3.7; x^2 modulus {:.12g} vs 4/3",
                         well_auto, well_grid, quad);
  return o;
}

// 5. Threshold dichotomy for -x^2/2.
Outcome threshold_dichotomy() {
  Outcome o;
  const FunctionSpec f = catalog::neg_quadratic(0.5);
  std::size_t points = 0, bad = 0;
  double worst = 0.0;
  for (int i = -10; i <= 10; ++i) {
    if (i == 0) continue;
    const Point x{0.3 * i};
    for (const ProxSolveConfig* cfg : {&kAuto, &kGrid}) {
      ++points;
      const ProxResult below = prox_map(f, 0.99, x, *cfg);
      const ProxResult above = prox_map(f, 1.01, x, *cfg);
      // e(x) = -x^2 / (2(1 - lambda)) below the threshold
      const double want = -x[0] * x[0] / (2.0 * (1.0 - 0.99));
      if (below.diverged || !above.diverged) ++bad;
      else worst = std::max(worst, std::abs(below.envelope_value.value() - want) / (1.0 + std::abs(want)));
    }
  }
  o.passed = bad == 0 && worst <= 1e-8;
  o.detail = fmt::format("{} (x, oracle) cases, {} wrong verdicts, worst relative envelope error {:.2g} at lambda 0.99",
                         points, bad, worst);
  return o;
}

// 6. Prox fixed points at minimizers, not at designated non-minimizers.
Outcome fixed_points() {
  Outcome o;
  std::size_t pos = 0, pos_fail = 0, neg = 0, neg_fail = 0;
  bool five_each = true;
  for (const FunctionSpec& f : catalog::default_matrix()) {
    five_each = five_each && f.non_minimizers.size() >= 5;
    for (double lambda : {0.01, 0.1}) {
      for (const ProxSolveConfig* cfg : {&kAuto, &kGrid}) {
        for (const KnownMinimizer& m : f.known_minimizers) {
          ++pos;
          if (!check_prox_fixed_point(f, m.point, lambda, *cfg).passed) ++pos_fail;
        }
        for (const Point& x : f.non_minimizers) {
          ++neg;
          if (check_prox_fixed_point(f, x, lambda, *cfg).passed) ++neg_fail;
        }
      }
    }
  }
  o.passed = pos_fail == 0 && neg_fail == 0 && five_each;
  o.detail = fmt::format("{} minimizer checks ({} failed), {} non-minimizer checks ({} wrongly fixed)", pos, pos_fail,
                         neg, neg_fail);
  return o;
}

// 7. Proximal point method against envelope gradient descent with step lambda.
Outcome ppm_equivalence() {
  Outcome o;
  struct Start {
    std::string f;
    Point x0;
    double lambda;
  };
  const std::vector<Start> starts = {
      {"quad(1)", Point{1.0}, 0.5},          {"abs", Point{3.0}, 1.0},
      {"huber(1)", Point{2.5}, 0.3},         {"double_well", Point{0.4}, 0.05},
      {"piecewise_min", Point{2.4}, 0.1},    {"quad_abs_2d", Point{1.0, -1.5}, 0.2},
  };
  double worst_closed = 0.0, worst_grid = 0.0, worst_rise = 0.0;
  bool aborted = false;
  for (const Start& s : starts) {
    const FunctionSpec f = catalog::by_name(s.f);
    for (const ProxSolveConfig* cfg : {&kAuto, &kGrid}) {
      const IterTrace ppm = proximal_point_run(f, s.x0, s.lambda, 20, 0.0, *cfg);
      const IterTrace gd = envelope_gd_run(f, s.x0, s.lambda, s.lambda, 20, 0.0, *cfg);
      aborted = aborted || gd.aborted || ppm.points.size() != gd.points.size();
      double& worst = cfg == &kGrid ? worst_grid : worst_closed;
      worst = std::max(worst, compare_traces(ppm, gd));
      for (std::size_t k = 1; k < ppm.values.size(); ++k)
        worst_rise = std::max(worst_rise, ppm.values[k] - ppm.values[k - 1]);
    }
  }
  o.passed = !aborted && worst_closed <= 1e-8 && worst_grid <= 1e-4 && worst_rise <= 1e-9;
  o.detail = fmt::format("{} starts x 20 iterations; max deviation {:.2g} (closed-form), {:.2g} (grid); max envelope rise {:.2g}",
                         starts.size(), worst_closed, worst_grid, worst_rise);
  return o;
}

// 8. Grid oracle against closed forms; closed forms against a dense scan.
Outcome oracle_equivalence() {
  Outcome o;
  SeededUniform rng(8);
  std::size_t cases = 0, bad_points = 0, bad_values = 0;
  double worst_point = 0.0, worst_value_ratio = 0.0;
  for (const FunctionSpec& f : catalog::default_matrix()) {
    if (!f.closed_form_prox) continue;
    const double h = kGrid.step_for(1);  // separable entries are solved per coordinate
    const ExtendedReal thr = prox_bound_threshold(f.certificate);
    const double lmax = thr.is_finite() ? 0.9 * thr.value() : 2.0;
    for (int k = 0; k < 100; ++k) {
      const double lambda = rng.next(0.01, lmax);
      Point x = Point::zeros(f.dim);
      for (std::size_t d = 0; d < f.dim; ++d) x[d] = rng.next(-3.0, 3.0);
      const ProxResult c = prox_map(f, lambda, x, kAuto);
      const ProxResult g = prox_map(f, lambda, x, kGrid);
      ++cases;
      if (!c.closed_form || g.closed_form || c.minimizers.size() != g.minimizers.size()) {
        ++bad_points;
        continue;
      }
      for (std::size_t i = 0; i < c.minimizers.size(); ++i) {
        const double d = distance(c.minimizers[i], g.minimizers[i]);
        worst_point = std::max(worst_point, d / (2.0 * h));
        if (d > 2.0 * h) ++bad_points;
      }
      const double tol = (f.curvature_bound + 1.0 / lambda) * h * h;
      const double diff = std::abs(c.envelope_value.value() - g.envelope_value.value());
      worst_value_ratio = std::max(worst_value_ratio, diff / tol);
      if (diff > tol) ++bad_values;
    }
  }

  // closed forms against an independent dense scan of the raw formulas
  const std::vector<std::pair<std::string, std::function<double(double)>>> raw = {
      {"quad(1)", [](double w) { return w * w; }},
      {"abs", [](double w) { return std::abs(w); }},
      {"huber(1)", [](double w) { return std::abs(w) <= 1.0 ? w * w / 2.0 : std::abs(w) - 0.5; }},
      {"indicator[0,1]", [](double w) { return w >= 0.0 && w <= 1.0 ? 0.0 : HUGE_VAL; }},
      {"neg_quad(0.5)", [](double w) { return -w * w / 2.0; }},
      {"double_well", [](double w) { return (w * w - 1.0) * (w * w - 1.0); }},
      {"piecewise_min", [](double w) { return std::min(w * w, (w - 2.0) * (w - 2.0) + 0.5); }},
      {"abs_plus_quad", [](double w) { return std::abs(w) + w * w; }},
  };
  double worst_scan = 0.0;
  for (const auto& [name, fn] : raw) {
    const FunctionSpec f = catalog::by_name(name);
    for (int k = 0; k < 10; ++k) {
      const double lambda = rng.next(0.05, 0.9);
      const double x = rng.next(-3.0, 3.0);
      const double want = oracle::scan_envelope(fn, lambda, x, 12.0).value;
      worst_scan = std::max(worst_scan, std::abs(moreau_envelope(f, lambda, Point{x}).value() - want));
    }
  }
  o.passed = bad_points == 0 && bad_values == 0 && worst_scan <= 1e-7;
  o.detail = fmt::format("{} (lambda, x) cases; worst prox gap {:.2g} x 2h, worst value gap {:.2g} x (C + 1/lambda) h^2; "
                         "closed forms vs dense scan {:.2g}",
                         cases, worst_point, worst_value_ratio, worst_scan);
  return o;
}

// 9. Envelope gradient against central differences on convex entries.
Outcome gradient_identity() {
  Outcome o;
  SeededUniform rng(9);
  constexpr double h_fd = 1e-5;
  std::size_t cases = 0, bad = 0;
  double worst = 0.0;
  for (const FunctionSpec& f : catalog::default_matrix()) {
    if (!f.convex) continue;
    for (int k = 0; k < 50; ++k) {
      const double lambda = rng.next(0.05, 1.5);
      Point x = Point::zeros(f.dim);
      for (std::size_t d = 0; d < f.dim; ++d) x[d] = rng.next(-3.0, 3.0);
      if (prox_map(f, lambda, x).minimizers.size() != 1) continue;
      const Point g = envelope_gradient(f, lambda, x);
      Point fd = Point::zeros(f.dim);
      for (std::size_t d = 0; d < f.dim; ++d) {
        Point a = x, b = x;
        a[d] += h_fd;
        b[d] -= h_fd;
        fd[d] = (moreau_envelope(f, lambda, a).value() - moreau_envelope(f, lambda, b).value()) / (2.0 * h_fd);
      }
      ++cases;
      const double scale = std::max(g.norm(), fd.norm());
      const double err = scale < 1e-8 ? 0.0 : distance(g, fd) / scale;
      worst = std::max(worst, err);
      if (err > 1e-5) ++bad;
    }
  }
  o.passed = bad == 0 && cases > 0;
  o.detail = fmt::format("{} points on convex entries, worst relative error {:.2g} (tol 1e-5)", cases, worst);
  return o;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 10. Two verify runs with the same seed are byte-identical.
Outcome determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "moreau_acceptance_determinism";
  fs::remove_all(root);
  std::map<std::string, std::string> runs[2];
  std::string stdout_text[2];
  int codes[2];
  for (int k = 0; k < 2; ++k) {
    const fs::path dir = root / std::to_string(k);
    std::ostringstream out, err;
    codes[k] = cli::run({"verify", "--out", dir.string(), "--seed", "42"}, out, err);
    stdout_text[k] = out.str();
    for (const auto& e : fs::directory_iterator(dir)) runs[k][e.path().filename().string()] = read_all(e.path());
  }
  fs::remove_all(root);
  o.passed = codes[0] == 0 && codes[1] == 0 && runs[0] == runs[1] && stdout_text[0] == stdout_text[1] && !runs[0].empty();
  o.detail = fmt::format("{} files per run, exit codes {} and {}, outputs {}", runs[0].size(), codes[0], codes[1],
                         runs[0] == runs[1] ? "identical" : "differ");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"shift identities", shift_identities},
      {"minimizer transfer", min_transfer},
      {"envelope error bound", error_bound},
      {"strong modulus transfer", strong_modulus},
      {"threshold dichotomy", threshold_dichotomy},
      {"prox fixed points", fixed_points},
      {"proximal point vs envelope gradient descent", ppm_equivalence},
      {"grid oracle vs closed forms", oracle_equivalence},
      {"envelope gradient identity", gradient_identity},
      {"verify determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += o.passed ? 0 : 1;
    std::cout << fmt::format("{} criterion {:>2} ({}): {} [{:.1f}s]\n", o.passed ? "PASS" : "FAIL", i + 1,
                             criteria[i].first, o.detail, secs)
              << std::flush;
  }
  std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
