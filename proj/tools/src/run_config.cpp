#include "run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "moreau/catalog.hpp"
#include "moreau/definition_file.hpp"
#include "moreau/errors.hpp"

namespace moreau::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config: '" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

double to_positive(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("config: '" + key + "' must be positive, got '" + value + "'");
  return v;
}

std::uint64_t to_count(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return v;
}

Point to_point(const std::string& key, const std::string& value) {
  try {
    return parse_point(value);
  } catch (const Error& e) {
    throw ConfigError("config: '" + key + "': " + e.what());
  }
}

ProxMethod to_method(const std::string& value) {
  if (value == "auto") return ProxMethod::automatic;
  if (value == "grid") return ProxMethod::grid;
  if (value == "closed_form") return ProxMethod::closed_form;
  throw ConfigError("config: method must be auto, grid or closed_form, got '" + value + "'");
}

}  // namespace

RunConfig parse_run_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty value for '" + key + "'");

    if (key == "function") cfg.functions.push_back(value);
    else if (key == "definition") cfg.definitions.emplace_back(value);
    else if (key == "lambda") {
      cfg.lambdas.push_back(to_positive(key, value));
      cfg.lambdas_given = true;
    } else if (key == "sigma") cfg.sigmas.push_back(to_positive(key, value));
    else if (key == "epsilon") cfg.epsilon = to_positive(key, value);
    else if (key == "radius") cfg.radius = to_positive(key, value);
    else if (key == "range_min") cfg.range_min = to_double(key, value);
    else if (key == "range_max") cfg.range_max = to_double(key, value);
    else if (key == "points") cfg.points = to_count(key, value);
    else if (key == "x") cfg.xs.push_back(to_point(key, value));
    else if (key == "x0") cfg.starts.push_back(to_point(key, value));
    else if (key == "max_iters") cfg.max_iters = to_count(key, value);
    else if (key == "stop_tol") cfg.stop_tol = to_double(key, value);
    else if (key == "step") cfg.step = to_double(key, value);
    else if (key == "shift_draws") cfg.shift_draws = to_count(key, value);
    else if (key == "seed") cfg.seed = to_count(key, value);
    else if (key == "out") cfg.out = value;
    else if (key == "h") cfg.solver.grid_step = to_positive(key, value);
    else if (key == "refine_iters") cfg.solver.refine_iters = static_cast<int>(to_count(key, value));
    else if (key == "value_tol") cfg.solver.value_tol = cfg.verify.value_tol = to_positive(key, value);
    else if (key == "cluster_radius") cfg.solver.cluster_radius = to_positive(key, value);
    else if (key == "method") cfg.solver.method = to_method(value);
    else if (key == "samples") cfg.verify.samples = to_count(key, value);
    else if (key == "modulus_tol") cfg.verify.modulus_tol = to_positive(key, value);
    else if (key == "bound_tol") cfg.verify.bound_tol_grid = to_positive(key, value);
    else throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (!(cfg.range_min < cfg.range_max)) throw ConfigError("config: range_min must be below range_max");
  if (cfg.points < 2) throw ConfigError("config: points must be at least 2");
  if (cfg.verify.samples == 0) throw ConfigError("config: samples must be positive");
  if (cfg.stop_tol && !(*cfg.stop_tol >= 0.0)) throw ConfigError("config: stop_tol must be non-negative");
  if (cfg.step && !(*cfg.step >= 0.0)) throw ConfigError("config: step must be non-negative");
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

std::vector<FunctionSpec> resolve_functions(const RunConfig& cfg) {
  std::vector<FunctionSpec> out;
  try {
    for (const auto& name : cfg.functions) out.push_back(catalog::by_name(name));
    for (const auto& path : cfg.definitions) out.push_back(load_function_definition(path));
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return out;
}

}  // namespace moreau::cli
