#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "moreau/point.hpp"

namespace moreau {

/// Radical inverse of `index` in `base` (van der Corput / Halton component).
double radical_inverse(std::uint64_t index, unsigned base);

/// `count` Halton points in [0,1)^dim, rotated by a seed-derived offset.
std::vector<Point> halton_points(std::size_t dim, std::size_t count, std::uint64_t seed);

/// Deterministic samples in the open ball B_radius(center): `count`
/// low-discrepancy points plus a uniform grid with spacing radius/100 in 1D
/// and radius/30 per axis otherwise. Points are returned in generation order.
std::vector<Point> ball_samples(const Point& center, double radius, std::size_t count,
                                std::uint64_t seed);

/// Uniform [lo, hi) draws from a seeded 64-bit generator; portable across
/// standard libraries.
class SeededUniform {
 public:
  explicit SeededUniform(std::uint64_t seed);
  double next(double lo, double hi);

 private:
  std::uint64_t state_;
};

}  // namespace moreau
