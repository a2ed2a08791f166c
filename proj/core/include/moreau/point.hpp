#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace moreau {

/// A point of R^n with finite coordinates.
class Point {
 public:
  Point() = default;
  Point(std::initializer_list<double> coords);
  explicit Point(std::vector<double> coords);

  static Point zeros(std::size_t dim) { return Point(std::vector<double>(dim, 0.0)); }
  /// Every coordinate equal to `v`.
  static Point filled(std::size_t dim, double v) { return Point(std::vector<double>(dim, v)); }

  std::size_t dim() const { return c_.size(); }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }
  std::span<const double> coords() const { return c_; }

  auto begin() const { return c_.begin(); }
  auto end() const { return c_.end(); }

  double squared_norm() const;
  double norm() const;

  Point& operator+=(const Point& o);
  Point& operator-=(const Point& o);
  Point& operator*=(double s);
  Point& operator/=(double s);

  friend Point operator+(Point a, const Point& b) { return a += b; }
  friend Point operator-(Point a, const Point& b) { return a -= b; }
  friend Point operator*(Point a, double s) { return a *= s; }
  friend Point operator*(double s, Point a) { return a *= s; }
  friend Point operator/(Point a, double s) { return a /= s; }

  /// Lexicographic order on coordinates.
  friend auto operator<=>(const Point& a, const Point& b) = default;
  friend bool operator==(const Point& a, const Point& b) = default;

 private:
  std::vector<double> c_;
};

double distance(const Point& a, const Point& b);
double squared_distance(const Point& a, const Point& b);

/// Coordinates joined by `sep`, each printed with 17 significant digits.
std::string format_point(const Point& p, char sep = ',');

/// Parses "1.5" or "1,2" (commas and/or whitespace separate coordinates).
Point parse_point(const std::string& text);

}  // namespace moreau
