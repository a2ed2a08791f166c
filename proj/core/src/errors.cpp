#include "moreau/errors.hpp"

#include <fmt/format.h>

namespace moreau {

namespace {

std::string join_expected(const std::vector<std::string>& expected) {
  std::string out;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (i > 0) out += ", ";
    out += expected[i];
  }
  return out;
}

}  // namespace

DimensionMismatch::DimensionMismatch(std::size_t expected, std::size_t actual)
    : Error(fmt::format("dimension mismatch: expected {}, got {}", expected, actual)),
      expected_(expected),
      actual_(actual) {}

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected,
                       const std::string& found)
    : Error(fmt::format("parse error at offset {}: expected one of {{{}}}, found {}", offset,
                        join_expected(expected), found)),
      offset_(offset),
      expected_(std::move(expected)) {}

ArityError::ArityError(std::size_t offset, std::size_t index, std::size_t dim)
    : Error(fmt::format("variable x{} at offset {} is outside x1..x{}", index, offset, dim)),
      offset_(offset) {}

ThresholdExceeded::ThresholdExceeded(double lambda, double threshold, const std::string& which)
    : Error(fmt::format("lambda = {} is not below the prox-boundedness threshold lambda_phi = {} of {}",
                        lambda, threshold, which)),
      lambda_(lambda),
      threshold_(threshold) {}

MultivaluedProx::MultivaluedProx(std::size_t clusters)
    : Error(fmt::format("proximal mapping has {} clusters; envelope gradient undefined", clusters)),
      clusters_(clusters) {}

}  // namespace moreau
