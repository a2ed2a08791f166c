#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "moreau/catalog.hpp"
#include "moreau/errors.hpp"
#include "moreau/prox_opt.hpp"

namespace moreau::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string num(double v) { return fmt::format("{:.17g}", v + 0.0); }

std::string slug(const std::string& name) {
  std::string s;
  for (char c : name) s += std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' ? c : '_';
  while (!s.empty() && s.back() == '_') s.pop_back();
  return s;
}

std::string join_points(const std::vector<Point>& pts) {
  std::string s;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0) s += ';';
    s += format_point(pts[i], ' ');
  }
  return s;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::vector<FunctionSpec> functions_or_throw(const RunConfig& cfg) {
  std::vector<FunctionSpec> fs_ = resolve_functions(cfg);
  if (fs_.empty()) throw ConfigError("config names no function");
  return fs_;
}

void require_below(const FunctionSpec& f, double lambda) {
  ensure_certificate(f);
  const ExtendedReal thr = prox_bound_threshold(f.certificate);
  if (!(ExtendedReal(lambda) < thr)) throw ThresholdExceeded(lambda, thr.value(), f.name);
}

std::vector<Point> sample_grid(const RunConfig& cfg, std::size_t dim) {
  std::vector<Point> pts;
  const auto coord = [&](std::size_t i) {
    const double n = static_cast<double>(cfg.points - 1), t = static_cast<double>(i);
    return (cfg.range_min * (n - t) + cfg.range_max * t) / n;
  };
  if (dim == 1) {
    for (std::size_t i = 0; i < cfg.points; ++i) pts.push_back(Point{coord(i)});
  } else if (dim == 2) {
    for (std::size_t i = 0; i < cfg.points; ++i)
      for (std::size_t j = 0; j < cfg.points; ++j) pts.push_back(Point{coord(i), coord(j)});
  } else {
    throw ConfigError("grid output supports dimensions 1 and 2; give explicit x points");
  }
  return pts;
}

std::string coord_header(std::size_t dim) {
  if (dim == 1) return "x";
  std::string s;
  for (std::size_t d = 1; d <= dim; ++d) s += (d > 1 ? ",x" : "x") + std::to_string(d);
  return s;
}

double ppm_lambda(const FunctionSpec& f) {
  const ExtendedReal thr = prox_bound_threshold(f.certificate);
  return thr.is_finite() ? std::min(0.1, 0.5 * thr.value()) : 0.1;
}

std::vector<Point> default_starts(const FunctionSpec& f) {
  std::vector<Point> starts;
  for (const auto& m : f.known_minimizers) starts.push_back(m.point + Point::filled(f.dim, 0.4));
  if (starts.empty()) starts.push_back(f.certificate.anchor + Point::filled(f.dim, 0.4));
  return starts;
}

std::vector<Point> starts_for(const RunConfig& cfg, const FunctionSpec& f) {
  std::vector<Point> s;
  for (const Point& p : cfg.starts)
    if (p.dim() == f.dim) s.push_back(p);
  return s.empty() ? default_starts(f) : s;
}

bool closed_form_path(const FunctionSpec& f, const ProxSolveConfig& pcfg) {
  return pcfg.method != ProxMethod::grid && static_cast<bool>(f.closed_form_prox);
}

}  // namespace

int cmd_envelope(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto fns = functions_or_throw(cfg);
  if (fns.size() != 1) throw ConfigError("envelope takes exactly one function");
  if (cfg.lambdas.empty()) throw ConfigError("envelope needs at least one lambda");
  const FunctionSpec& f = fns.front();
  for (double lambda : cfg.lambdas) require_below(f, lambda);
  const std::vector<Point> xs = cfg.xs.empty() ? sample_grid(cfg, f.dim) : cfg.xs;
  prepare_dir(cfg.out);

  json files = json::array();
  for (std::size_t k = 0; k < cfg.lambdas.size(); ++k) {
    const double lambda = cfg.lambdas[k];
    const fs::path path = cfg.out / fmt::format("envelope_{}.csv", k);
    std::ofstream csv = open_out(path);
    csv << coord_header(f.dim) << ",envelope,prox\n";
    for (const Point& x : xs) {
      if (x.dim() != f.dim) throw DimensionMismatch(f.dim, x.dim());
      const ProxResult r = prox_map(f, lambda, x, cfg.solver);
      if (r.diverged) throw ThresholdExceeded(lambda, prox_bound_threshold(f.certificate).value(), f.name);
      csv << format_point(x) << ',' << num(r.envelope_value.value()) << ',' << join_points(r.minimizers) << '\n';
    }
    files.push_back({{"lambda", lambda}, {"file", path.filename().string()}, {"rows", xs.size()}});
    if (!opt.json_summary) out << fmt::format("lambda = {}: {} rows -> {}\n", num(lambda), xs.size(), path.string());
  }
  if (opt.json_summary) out << json{{"command", "envelope"}, {"function", f.name}, {"files", files}}.dump(2) << '\n';
  return kOk;
}

int cmd_prox(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto fns = functions_or_throw(cfg);
  if (cfg.lambdas.empty()) throw ConfigError("prox needs at least one lambda");
  prepare_dir(cfg.out);
  const fs::path path = cfg.out / "prox.csv";
  std::ofstream csv = open_out(path);
  csv << "function,lambda,x,diverged,envelope,prox\n";
  std::size_t rows = 0, diverged = 0;
  for (const FunctionSpec& f : fns) {
    ensure_certificate(f);
    std::vector<Point> xs;
    for (const Point& p : cfg.xs)
      if (p.dim() == f.dim) xs.push_back(p);
    if (xs.empty()) xs = sample_grid(cfg, f.dim);
    for (double lambda : cfg.lambdas) {
      for (const Point& x : xs) {
        const ProxResult r = prox_map(f, lambda, x, cfg.solver);
        csv << f.name << ',' << num(lambda) << ',' << format_point(x, ' ') << ',' << (r.diverged ? "true" : "false")
            << ',' << (r.diverged ? "" : num(r.envelope_value.value())) << ',' << join_points(r.minimizers) << '\n';
        ++rows;
        diverged += r.diverged ? 1 : 0;
      }
    }
  }
  if (opt.json_summary) {
    out << json{{"command", "prox"}, {"file", path.filename().string()}, {"rows", rows}, {"diverged", diverged}}.dump(2)
        << '\n';
  } else {
    out << fmt::format("{} rows ({} diverged) -> {}\n", rows, diverged, path.string());
  }
  return kOk;
}

int cmd_threshold(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto fns = functions_or_throw(cfg);
  json rows = json::array();
  std::string table = fmt::format("{:<28} {:>12} {:>12} {:>14} {:>10}\n", "function", "alpha", "beta", "lambda_phi", "certificate");
  for (const FunctionSpec& f : fns) {
    const bool exact = f.certificate.verified;
    ensure_certificate(f);
    const ExtendedReal thr = prox_bound_threshold(f.certificate);
    const std::string thr_text = thr.is_finite() ? num(thr.value()) : "inf";
    rows.push_back({{"function", f.name},
                    {"alpha", f.certificate.alpha},
                    {"beta", f.certificate.beta},
                    {"anchor", format_point(f.certificate.anchor, ' ')},
                    {"certificate", exact ? "exact" : "sampled"},
                    {"lambda_phi", thr_text}});
    table += fmt::format("{:<28} {:>12.6g} {:>12.6g} {:>14} {:>10}\n", f.name, f.certificate.alpha, f.certificate.beta,
                         thr_text, exact ? "exact" : "sampled");
  }
  out << (opt.json_summary ? rows.dump(2) + "\n" : table);
  return kOk;
}

namespace {

class Suite {
 public:
  Suite(const RunConfig& cfg) : cfg_(cfg) {}

  template <class Fn>
  void record(const std::string& theorem, const FunctionSpec& f, Fn&& fn) {
    VerificationReport r;
    try {
      r = fn();
    } catch (const Error& e) {
      r = VerificationReport{};
      r.theorem_id = theorem;
      r.function = f.name;
      r.passed = false;
      r.worst_violation = std::numeric_limits<double>::infinity();
      r.message = e.what();
    }
    reports_.push_back(std::move(r));
  }

  int finish(const Options& opt, std::ostream& out) const {
    prepare_dir(cfg_.out);
    json entries = json::array();
    std::size_t failed = 0;
    std::string table = fmt::format("{:>4}  {:<26} {:<26} {:>12} {:>10}  {}\n", "#", "check", "function", "worst", "tolerance", "result");
    for (std::size_t i = 0; i < reports_.size(); ++i) {
      const VerificationReport& r = reports_[i];
      const std::string file = fmt::format("{:03}_{}_{}.json", i + 1, r.theorem_id, slug(r.function));
      std::ofstream(cfg_.out / file, std::ios::binary) << to_json(r);
      double tol = std::numeric_limits<double>::quiet_NaN();
      for (const auto& [name, value] : r.params)
        if (name == "tolerance") tol = value;
      failed += r.passed ? 0 : 1;
      entries.push_back({{"file", file},
                         {"theorem_id", r.theorem_id},
                         {"function", r.function},
                         {"passed", r.passed},
                         {"worst_violation", std::isfinite(r.worst_violation) ? json(r.worst_violation) : json("inf")}});
      table += fmt::format("{:>4}  {:<26} {:<26} {:>12.4g} {:>10.3g}  {}{}\n", i + 1, r.theorem_id, r.function,
                           r.worst_violation, tol, r.passed ? "PASS" : "FAIL",
                           r.message.empty() ? "" : "  (" + r.message + ")");
    }
    const json summary{{"checks", reports_.size()},
                       {"passed", reports_.size() - failed},
                       {"failed", failed},
                       {"seed", cfg_.seed},
                       {"reports", entries}};
    std::ofstream(cfg_.out / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
    if (opt.json_summary) {
      out << summary.dump(2) << '\n';
    } else {
      out << table << fmt::format("{} of {} checks passed\n", reports_.size() - failed, reports_.size());
    }
    return failed == 0 ? kOk : kCheckFailed;
  }

 private:
  const RunConfig& cfg_;
  std::vector<VerificationReport> reports_;
};

VerificationReport claim_report(const FunctionSpec& f, const KnownMinimizer& m, const VerifyConfig& vcfg) {
  const MinimizerCertificate c = m.kind == MinimizerKind::strong
                                     ? verify_strong_min(f, m.point, m.modulus, m.epsilon, vcfg.samples, vcfg)
                                     : verify_local_min(f, m.point, m.epsilon, vcfg.samples, vcfg);
  VerificationReport r;
  r.theorem_id = "minimizer-claim";
  r.function = f.name;
  r.worst_violation = c.worst_violation;
  r.witness = c.witness;
  r.params = {{"epsilon", m.epsilon}, {"modulus", m.modulus}};
  r.certificates = {{"claim", c}};
  r.conclude(vcfg.value_tol);
  return r;
}

VerificationReport nonminimizer_report(const FunctionSpec& f, const Point& x, double lambda, const ProxSolveConfig& pcfg,
                                       const VerifyConfig& vcfg) {
  const VerificationReport fixed = check_prox_fixed_point(f, x, lambda, pcfg, vcfg);
  VerificationReport r;
  r.theorem_id = "fixed-point-nonminimizer";
  r.function = f.name;
  r.witness = x;
  // the prox must move away from a point without a zero proximal subgradient
  r.worst_violation = fixed.passed ? 1.0 : 0.0;
  r.params = {{"lambda", lambda}, {"displacement", fixed.worst_violation}};
  r.conclude(0.0);
  return r;
}

VerificationReport ppm_report(const FunctionSpec& f, const Point& x0, const RunConfig& cfg, bool descent) {
  const double lambda = ppm_lambda(f);
  const double stop = cfg.stop_tol.value_or(0.0);
  const IterTrace ppm = proximal_point_run(f, x0, lambda, cfg.max_iters, stop, cfg.solver);
  VerificationReport r;
  r.function = f.name;
  r.params = {{"lambda", lambda}, {"iterations", static_cast<double>(ppm.iterations)}};
  if (descent) {
    r.theorem_id = "ppm-descent";
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < ppm.values.size(); ++k) {
      const double rise = ppm.values[k] - ppm.values[k - 1];
      if (rise > worst) {
        worst = rise;
        r.witness = ppm.points[k];
      }
    }
    r.worst_violation = std::max(worst, 0.0);
    r.conclude(cfg.verify.value_tol);
  } else {
    r.theorem_id = "ppm-equivalence";
    const IterTrace gd = envelope_gd_run(f, x0, lambda, lambda, cfg.max_iters, stop, cfg.solver);
    r.worst_violation = compare_traces(ppm, gd);
    r.params.emplace_back("compared", static_cast<double>(std::min(ppm.points.size(), gd.points.size())));
    if (gd.aborted) r.message = gd.message;
    r.conclude(closed_form_path(f, cfg.solver) ? 1e-8 : 1e-4);
  }
  r.witness = r.passed ? std::nullopt : std::optional<Point>(x0);
  return r;
}

}  // namespace

int cmd_verify(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  std::vector<FunctionSpec> fns = resolve_functions(cfg);
  if (fns.empty()) fns = catalog::default_matrix();
  const ProxSolveConfig& pcfg = cfg.solver;
  VerifyConfig vcfg = cfg.verify;
  vcfg.seed = cfg.seed;

  Suite suite(cfg);
  for (std::size_t fi = 0; fi < fns.size(); ++fi) {
    const FunctionSpec& f = fns[fi];
    const ExtendedReal thr = prox_bound_threshold(f.certificate);
    std::vector<double> lambdas = cfg.lambdas;
    if (!cfg.lambdas_given) {
      lambdas = {0.01, 0.1, 0.5 * (thr.is_finite() ? std::min(thr.value(), 1.0) : 1.0)};
    }

    for (const KnownMinimizer& m : f.known_minimizers) {
      suite.record("minimizer-claim", f, [&] { return claim_report(f, m, vcfg); });
      const double radius = cfg.radius.value_or(m.epsilon);
      const double eps = cfg.epsilon.value_or(m.epsilon);
      for (double lambda : lambdas) {
        suite.record("min-transfer", f, [&] { return check_min_transfer(f, m.point, lambda, eps, pcfg, vcfg); });
        suite.record("error-bound", f,
                     [&] { return check_error_bound(f, m.point, lambda, radius, vcfg.samples, pcfg, vcfg); });
        if (lambda <= 0.1) {
          suite.record("prox-fixed-point", f, [&] { return check_prox_fixed_point(f, m.point, lambda, pcfg, vcfg); });
        }
      }
      if (m.kind != MinimizerKind::strong) continue;
      const std::vector<double> sigmas = cfg.sigmas.empty() ? std::vector<double>{m.modulus} : cfg.sigmas;
      for (double sigma : sigmas) {
        suite.record("shift-equivalence", f, [&] { return check_shift_equivalence(f, m.point, sigma, eps, vcfg); });
        double limit = 1.0 / sigma;
        if (thr.is_finite()) limit = std::min(limit, thr.value());
        bool any = false;
        for (double lambda : lambdas) {
          if (!(lambda < 0.5 * limit)) continue;
          any = true;
          suite.record("strong-transfer", f,
                       [&] { return check_strong_transfer(f, m.point, sigma, eps, lambda, pcfg, vcfg); });
        }
        if (!any) {
          suite.record("strong-transfer", f,
                       [&] { return check_strong_transfer(f, m.point, sigma, eps, 0.25 * limit, pcfg, vcfg); });
        }
      }
    }

    for (const Point& x : f.non_minimizers) {
      for (double lambda : lambdas) {
        if (lambda > 0.1) continue;
        suite.record("fixed-point-nonminimizer", f, [&] { return nonminimizer_report(f, x, lambda, pcfg, vcfg); });
      }
    }

    if (cfg.shift_draws > 0) {
      ShiftIdentityResult shift;
      suite.record("shift-identity-envelope", f, [&] {
        shift = check_shift_identities(f, cfg.shift_draws, cfg.seed + fi, pcfg);
        return shift.via_shift;
      });
      if (!shift.via_f.theorem_id.empty()) suite.record("shift-identity-shifted", f, [&] { return shift.via_f; });
    }

    for (const Point& x0 : starts_for(cfg, f)) {
      suite.record("ppm-equivalence", f, [&] { return ppm_report(f, x0, cfg, false); });
      suite.record("ppm-descent", f, [&] { return ppm_report(f, x0, cfg, true); });
    }
  }
  return suite.finish(opt, out);
}

int cmd_optimize(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto fns = functions_or_throw(cfg);
  prepare_dir(cfg.out);
  std::ofstream dev = open_out(cfg.out / "deviation.csv");
  dev << "run,function,lambda,step,x0,ppm_iterations,gd_iterations,gd_aborted,max_deviation\n";
  json runs = json::array();
  std::size_t run = 0;
  for (const FunctionSpec& f : fns) {
    const std::vector<double> lambdas = cfg.lambdas.empty() ? std::vector<double>{ppm_lambda(f)} : cfg.lambdas;
    for (double lambda : lambdas) {
      require_below(f, lambda);
      const double step = cfg.step.value_or(lambda);
      const double stop = cfg.stop_tol.value_or(closed_form_path(f, cfg.solver) ? 1e-8 : 1e-5);
      for (const Point& x0 : starts_for(cfg, f)) {
        const IterTrace ppm = proximal_point_run(f, x0, lambda, cfg.max_iters, stop, cfg.solver);
        const IterTrace gd = envelope_gd_run(f, x0, lambda, step, cfg.max_iters, stop, cfg.solver);
        std::ofstream a = open_out(cfg.out / fmt::format("ppm_{}.csv", run));
        write_trace_csv(ppm, a);
        std::ofstream b = open_out(cfg.out / fmt::format("gd_{}.csv", run));
        write_trace_csv(gd, b);
        const double deviation = compare_traces(ppm, gd);
        dev << run << ',' << f.name << ',' << num(lambda) << ',' << num(step) << ',' << format_point(x0, ' ') << ','
            << ppm.iterations << ',' << gd.iterations << ',' << (gd.aborted ? "true" : "false") << ','
            << num(deviation) << '\n';
        runs.push_back({{"run", run},
                        {"function", f.name},
                        {"lambda", lambda},
                        {"step", step},
                        {"ppm_iterations", ppm.iterations},
                        {"gd_iterations", gd.iterations},
                        {"gd_aborted", gd.aborted},
                        {"max_deviation", deviation}});
        if (!opt.json_summary) {
          out << fmt::format("run {}: {} lambda={} x0=[{}] ppm {} it, gd {} it{}, max deviation {:.3g}\n", run, f.name,
                             num(lambda), format_point(x0), ppm.iterations, gd.iterations,
                             gd.aborted ? " (aborted)" : "", deviation);
        }
        ++run;
      }
    }
  }
  if (opt.json_summary) out << json{{"command", "optimize"}, {"runs", runs}}.dump(2) << '\n';
  return kOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Moreau envelopes, proximal maps and minimizer checks"};
  app.name("moreau");
  app.require_subcommand(1);
  std::string config_path, out_dir;
  std::optional<std::uint64_t> seed;
  std::vector<double> lambdas;
  Options opt;
  app.add_option("--config", config_path, "run config file (key = value)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "sampling seed");
  app.add_option("--lambda", lambdas, "lambda value; repeatable, replaces the config list")->allow_extra_args(false);
  app.add_flag("--json-summary", opt.json_summary, "print a JSON summary instead of text");
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"envelope", "envelope values and prox points on a grid, one CSV per lambda"},
      {"prox", "prox sets at configured points"},
      {"verify", "run the minimizer and envelope checks and write JSON reports"},
      {"optimize", "proximal point and envelope gradient descent traces"},
      {"threshold", "prox-boundedness thresholds of the configured functions"},
  };
  for (const auto& [name, help] : subs) app.add_subcommand(name, help)->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "moreau: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_run_config(config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (seed) cfg.seed = *seed;
    if (!lambdas.empty()) {
      for (double l : lambdas)
        if (!(l > 0.0)) throw ConfigError("--lambda values must be positive");
      cfg.lambdas = lambdas;
      cfg.lambdas_given = true;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "envelope") return cmd_envelope(cfg, opt, out);
    if (cmd == "prox") return cmd_prox(cfg, opt, out);
    if (cmd == "verify") return cmd_verify(cfg, opt, out);
    if (cmd == "optimize") return cmd_optimize(cfg, opt, out);
    return cmd_threshold(cfg, opt, out);
  } catch (const ThresholdExceeded& e) {
    err << "moreau: " << e.what() << '\n';
    return kThresholdExceeded;
  } catch (const ConfigError& e) {
    err << "moreau: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "moreau: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace moreau::cli
