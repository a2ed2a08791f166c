#include "moreau/definition_file.hpp"

#include <fstream>
#include <optional>
#include <sstream>

#include "moreau/expression.hpp"

namespace moreau {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) throw InvalidArgument("definition: bad number for '" + key + "': " + value);
  return v;
}

KnownMinimizer parse_minimizer(const std::string& text) {
  std::istringstream in(text);
  std::string point, kind;
  in >> point >> kind;
  if (point.empty()) throw InvalidArgument("definition: empty minimizer entry");
  KnownMinimizer m;
  m.point = parse_point(point);
  m.epsilon = 0.1;
  if (kind.empty() || kind == "local") {
    m.kind = MinimizerKind::local;
  } else if (kind == "strong") {
    m.kind = MinimizerKind::strong;
  } else {
    throw InvalidArgument("definition: minimizer kind must be local or strong, got '" + kind + "'");
  }
  std::string token;
  if (in >> token) m.modulus = to_double("minimizer modulus", token);
  if (in >> token) m.epsilon = to_double("minimizer epsilon", token);
  if (m.kind == MinimizerKind::strong && !(m.modulus > 0.0)) {
    throw InvalidArgument("definition: strong minimizer needs a positive modulus");
  }
  if (!(m.epsilon > 0.0)) throw InvalidArgument("definition: minimizer epsilon must be positive");
  return m;
}

}  // namespace

FunctionSpec parse_function_definition(const std::string& text, const std::string& name) {
  std::optional<std::string> expr;
  std::size_t dim = 1;
  std::optional<double> alpha, beta;
  std::optional<Point> anchor;
  std::vector<KnownMinimizer> minimizers;
  std::string display_name = name;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidArgument("definition line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "expr") {
      expr = value;
    } else if (key == "dim") {
      const double d = to_double(key, value);
      if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d))) throw InvalidArgument("definition: dim must be a positive integer");
      dim = static_cast<std::size_t>(d);
    } else if (key == "alpha") {
      alpha = to_double(key, value);
    } else if (key == "beta") {
      beta = to_double(key, value);
    } else if (key == "anchor") {
      anchor = parse_point(value);
    } else if (key == "name") {
      display_name = value;
    } else if (key == "minimizer") {
      minimizers.push_back(parse_minimizer(value));
    } else if (key == "minimizers") {
      std::istringstream list(value);
      std::string item;
      while (std::getline(list, item, ';')) {
        if (!trim(item).empty()) minimizers.push_back(parse_minimizer(trim(item)));
      }
    } else {
      throw InvalidArgument("definition line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!expr) throw InvalidArgument("definition: missing 'expr'");
  if (alpha.has_value() != beta.has_value()) throw InvalidArgument("definition: alpha and beta must be given together");

  std::optional<ProxBoundCertificate> cert;
  if (alpha) {
    const Point a = anchor ? *anchor : Point::zeros(dim);
    if (a.dim() != dim) throw DimensionMismatch(dim, a.dim());
    cert = ProxBoundCertificate{*alpha, *beta, a, false};
  }
  FunctionSpec f = parse_function(*expr, dim, cert);
  f.name = display_name;
  for (const KnownMinimizer& m : minimizers) {
    if (m.point.dim() != dim) throw DimensionMismatch(dim, m.point.dim());
  }
  f.known_minimizers = std::move(minimizers);
  return f;
}

FunctionSpec load_function_definition(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open definition file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_function_definition(buf.str(), path.stem().string());
}

}  // namespace moreau
