#pragma once

#include <cmath>
#include <compare>
#include <limits>

#include "moreau/errors.hpp"

namespace moreau {

/// A real number or +infinity. -infinity and NaN are not representable;
/// constructing from either throws InvalidValue.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  ExtendedReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw InvalidValue("value is NaN or -infinity");
    }
  }

  static ExtendedReal infinity() { return ExtendedReal(std::numeric_limits<double>::infinity()); }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_infinite() const { return !is_finite(); }

  /// The value as a double; +inf when infinite.
  double value() const { return v_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) { return ExtendedReal(a.v_ + b.v_); }
  friend ExtendedReal operator+(ExtendedReal a, double b) { return ExtendedReal(a.v_ + b); }
  friend ExtendedReal operator-(ExtendedReal a, double b) { return ExtendedReal(a.v_ - b); }

  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }
  friend std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) { return a.v_ <=> b.v_; }

 private:
  double v_ = 0.0;
};

}  // namespace moreau
