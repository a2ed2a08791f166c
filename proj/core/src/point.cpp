#include "moreau/point.hpp"

#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "moreau/errors.hpp"

namespace moreau {

namespace {

void require_finite(const std::vector<double>& c) {
  for (double v : c) {
    if (!std::isfinite(v)) throw InvalidArgument("point coordinates must be finite");
  }
}

}  // namespace

Point::Point(std::initializer_list<double> coords) : c_(coords) { require_finite(c_); }

Point::Point(std::vector<double> coords) : c_(std::move(coords)) { require_finite(c_); }

double Point::squared_norm() const {
  double s = 0.0;
  for (double v : c_) s += v * v;
  return s;
}

double Point::norm() const { return std::sqrt(squared_norm()); }

Point& Point::operator+=(const Point& o) {
  if (o.dim() != dim()) throw DimensionMismatch(dim(), o.dim());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Point& Point::operator-=(const Point& o) {
  if (o.dim() != dim()) throw DimensionMismatch(dim(), o.dim());
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Point& Point::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Point& Point::operator/=(double s) {
  for (double& v : c_) v /= s;
  return *this;
}

double squared_distance(const Point& a, const Point& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch(a.dim(), b.dim());
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double distance(const Point& a, const Point& b) { return std::sqrt(squared_distance(a, b)); }

std::string format_point(const Point& p, char sep) {
  std::string out;
  for (std::size_t i = 0; i < p.dim(); ++i) {
    if (i > 0) out += sep;
    out += fmt::format("{:.17g}", p[i] + 0.0);  // prints -0 as 0
  }
  return out;
}

Point parse_point(const std::string& text) {
  std::string normalized = text;
  for (char& ch : normalized) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream in(normalized);
  std::vector<double> coords;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      throw InvalidArgument("bad coordinate '" + token + "' in point '" + text + "'");
    }
    if (used != token.size()) throw InvalidArgument("bad coordinate '" + token + "' in point '" + text + "'");
    coords.push_back(v);
  }
  if (coords.empty()) throw InvalidArgument("empty point");
  return Point(std::move(coords));
}

}  // namespace moreau
