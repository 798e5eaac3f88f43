#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "fracvel/errors.hpp"

namespace fracvel {

/// Exact rational p/q (q > 0), kept in lowest terms. Dyadic rationals p/2^k
/// are the special case where q is a power of two.
class ExactScalar {
public:
  static constexpr int max_dyadic_exponent = 62;

  static ExactScalar rational(std::int64_t p, std::int64_t q) {
    if (q == 0) throw domain_error("ExactScalar: zero denominator");
    if (q < 0) {
      p = -p;
      q = -q;
    }
    const std::int64_t g = std::gcd(p, q);
    return ExactScalar(p / g, q / g);
  }

  static ExactScalar dyadic(std::int64_t p, int k) {
    if (k < 0 || k > max_dyadic_exponent) throw domain_error("ExactScalar: dyadic exponent out of range");
    return rational(p, std::int64_t{1} << k);
  }

  /// Exact conversion of a finite double whose binary expansion fits in
  /// max_dyadic_exponent fractional bits.
  static ExactScalar from_double(double x) {
    if (!std::isfinite(x)) throw domain_error("ExactScalar: non-finite value");
    int k = 0;
    double scaled = x;
    while (scaled != std::floor(scaled)) {
      if (++k > max_dyadic_exponent) throw domain_error("ExactScalar: value is not a short dyadic");
      scaled = std::ldexp(x, k);
    }
    if (std::abs(scaled) >= 9.2e18) throw domain_error("ExactScalar: value out of range");
    return dyadic(static_cast<std::int64_t>(scaled), k);
  }

  std::int64_t num() const noexcept { return p_; }
  std::int64_t den() const noexcept { return q_; }

  double value() const noexcept { return static_cast<double>(p_) / static_cast<double>(q_); }

  bool is_dyadic() const noexcept { return std::has_single_bit(static_cast<std::uint64_t>(q_)); }

  /// k such that the value is p/2^k in lowest terms; -1 when not dyadic.
  int dyadic_exponent() const noexcept {
    return is_dyadic() ? std::countr_zero(static_cast<std::uint64_t>(q_)) : -1;
  }

  bool in_unit_interval() const noexcept { return p_ >= 0 && p_ <= q_; }

  std::string str() const { return std::to_string(p_) + "/" + std::to_string(q_); }

  friend bool operator==(const ExactScalar&, const ExactScalar&) = default;

  /// Doubling map step used by the two-branch recursions: returns 2x for
  /// x < 1/2 and 2x - 1 otherwise. Requires x in [0, 1].
  ExactScalar doubled_mod() const {
    const std::int64_t twice = 2 * p_;
    return twice < q_ ? rational(twice, q_) : rational(twice - q_, q_);
  }
  bool below_half() const noexcept { return 2 * p_ < q_; }

private:
  ExactScalar(std::int64_t p, std::int64_t q) : p_(p), q_(q) {}
  std::int64_t p_;
  std::int64_t q_;
};

}  // namespace fracvel
