#include "moreau/sampling.hpp"

#include <array>
#include <cmath>

#include "moreau/errors.hpp"

namespace moreau {

namespace {

constexpr std::array<unsigned, 8> kPrimes = {2, 3, 5, 7, 11, 13, 17, 19};

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double unit_from_bits(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace

double radical_inverse(std::uint64_t index, unsigned base) {
  double inv_base = 1.0 / base;
  double factor = inv_base;
  double result = 0.0;
  while (index > 0) {
    result += static_cast<double>(index % base) * factor;
    index /= base;
    factor *= inv_base;
  }
  return result;
}

std::vector<Point> halton_points(std::size_t dim, std::size_t count, std::uint64_t seed) {
  if (dim == 0 || dim > kPrimes.size()) throw InvalidArgument("halton_points: unsupported dimension");
  std::uint64_t state = seed;
  std::vector<double> shift(dim);
  for (double& s : shift) s = unit_from_bits(splitmix64(state));

  std::vector<Point> out;
  out.reserve(count);
  std::vector<double> u(dim);
  for (std::size_t k = 0; k < count; ++k) {
    for (std::size_t d = 0; d < dim; ++d) {
      double v = radical_inverse(k + 1, kPrimes[d]) + shift[d];
      u[d] = v - std::floor(v);
    }
    out.emplace_back(u);
  }
  return out;
}

std::vector<Point> ball_samples(const Point& center, double radius, std::size_t count,
                                std::uint64_t seed) {
  if (!(radius > 0.0)) throw InvalidArgument("ball_samples: radius must be positive");
  const std::size_t dim = center.dim();
  std::vector<Point> out;
  const double r2 = radius * radius;

  // Low-discrepancy points, rejection-sampled from the enclosing cube.
  std::size_t generated = 0;
  std::size_t batch = count * (dim == 1 ? 1 : 2) + 8;
  std::uint64_t batch_seed = seed;
  while (generated < count) {
    for (const Point& u : halton_points(dim, batch, batch_seed)) {
      Point p = center;
      for (std::size_t d = 0; d < dim; ++d) p[d] += radius * (2.0 * u[d] - 1.0);
      if (squared_distance(p, center) < r2) {
        out.push_back(std::move(p));
        if (++generated == count) break;
      }
    }
    ++batch_seed;
  }

  // Uniform grid.
  const int per_side = dim == 1 ? 100 : 30;
  const double spacing = radius / per_side;
  if (dim <= 3) {
    std::vector<int> idx(dim, -per_side);
    while (true) {
      Point p = center;
      for (std::size_t d = 0; d < dim; ++d) p[d] += spacing * idx[d];
      if (squared_distance(p, center) < r2) out.push_back(std::move(p));
      std::size_t d = 0;
      while (d < dim && ++idx[d] > per_side) idx[d++] = -per_side;
      if (d == dim) break;
    }
  }
  return out;
}

SeededUniform::SeededUniform(std::uint64_t seed) : state_(seed) {}

double SeededUniform::next(double lo, double hi) { return lo + (hi - lo) * unit_from_bits(splitmix64(state_)); }

}  // namespace moreau
