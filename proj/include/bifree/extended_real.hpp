#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <optional>
#include <string>

#include "bifree/errors.hpp"

namespace bifree {

/// A real number or negative infinity. Log-volumes and entropies live here:
/// the empty microstate set has log-volume -inf, and nothing may be +inf.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double value) : value_(value) {}  // NOLINT: implicit by design of the algebra

  static constexpr ExtendedReal neg_infinity() {
    ExtendedReal r;
    r.neg_inf_ = true;
    return r;
  }

  /// log(x) for x >= 0, with log(0) = -inf.
  static ExtendedReal log_of(double x) {
    require(x >= 0.0 && !std::isnan(x), "log of a negative number");
    if (x == 0.0) return neg_infinity();
    return {std::log(x)};
  }

  constexpr bool is_neg_infinity() const { return neg_inf_; }
  constexpr bool is_finite() const { return !neg_inf_; }

  double value() const {
    if (neg_inf_) throw InvalidArgument("value() of -inf");
    return value_;
  }

  /// -inf maps to -std::numeric_limits<double>::infinity(); only for output.
  constexpr double to_double() const {
    return neg_inf_ ? -std::numeric_limits<double>::infinity() : value_;
  }

  std::optional<double> finite() const {
    if (neg_inf_) return std::nullopt;
    return value_;
  }

  friend constexpr ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (a.neg_inf_ || b.neg_inf_) return neg_infinity();
    return {a.value_ + b.value_};
  }
  friend constexpr ExtendedReal operator-(ExtendedReal a, double b) { return a + ExtendedReal(-b); }
  friend constexpr ExtendedReal operator*(ExtendedReal a, double positive_scale) {
    if (a.neg_inf_) return neg_infinity();
    return {a.value_ * positive_scale};
  }

  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) {
    if (a.neg_inf_ || b.neg_inf_) return a.neg_inf_ == b.neg_inf_;
    return a.value_ == b.value_;
  }
  friend constexpr std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
    if (a.neg_inf_ && b.neg_inf_) return std::partial_ordering::equivalent;
    if (a.neg_inf_) return std::partial_ordering::less;
    if (b.neg_inf_) return std::partial_ordering::greater;
    return a.value_ <=> b.value_;
  }

  std::string to_string() const;

 private:
  double value_ = 0.0;
  bool neg_inf_ = false;
};

}  // namespace bifree
