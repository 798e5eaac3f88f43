#pragma once

// De Rham's singular function R_a on [0, 1]:
//
//   R_a(0) = 0,  R_a(1) = 1,
//   R_a(x) = a R_a(2x)                for 0 <= x < 1/2,
//   R_a(x) = (1 - a) R_a(2x - 1) + a  for 1/2 <= x <= 1,
//
// together with its binary-digit closed form, the exact fractional velocity
// on dyadic rationals, the r_n / d_n iterations and a coin-flip sampler.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "fracvel/errors.hpp"
#include "fracvel/exact_scalar.hpp"
#include "fracvel/signal.hpp"

namespace fracvel {

/// Binary expansion 0.d_1 d_2 ... d_n, most significant digit first.
struct DyadicNumber {
  std::vector<std::uint8_t> digits;
  /// True iff the source value has no nonzero digit past `depth()`.
  bool terminating = false;

  int depth() const noexcept { return static_cast<int>(digits.size()); }

  int digit_sum() const noexcept {
    int s = 0;
    for (auto d : digits) s += d;
    return s;
  }

  double value() const noexcept {
    double v = 0.0;
    for (size_t k = 0; k < digits.size(); ++k)
      if (digits[k]) v += std::ldexp(1.0, -static_cast<int>(k + 1));
    return v;
  }
};

/// Binary digits of x in [0, 1] to `depth` places, truncated (never rounded).
/// x = 1 is expanded as 0.111..., which is never terminating.
inline DyadicNumber dyadic_expand(const ExactScalar& x, int depth) {
  if (!x.in_unit_interval()) throw domain_error("dyadic_expand: x outside [0, 1]");
  if (depth < 1) throw domain_error("dyadic_expand: depth must be >= 1");
  DyadicNumber out;
  out.digits.reserve(static_cast<size_t>(depth));
  const bool is_one = x.num() == x.den();
  // Long division of p/q in base 2.
  std::int64_t r = x.num();
  const std::int64_t q = x.den();
  for (int k = 0; k < depth; ++k) {
    if (is_one) {
      out.digits.push_back(1);
      continue;
    }
    r *= 2;
    if (r >= q) {
      out.digits.push_back(1);
      r -= q;
    } else {
      out.digits.push_back(0);
    }
  }
  out.terminating = !is_one && r == 0;
  return out;
}

/// Weight parameter a of R_a. The fair-coin value a = 1/2 (where R_a is the
/// identity and the velocity order degenerates to 1) is rejected; the
/// evaluation functions also have overloads taking a bare weight, which
/// accept it.
class DeRhamParams {
public:
  explicit DeRhamParams(double a) : a_(a) {
    if (!(a > 0.0 && a < 1.0)) throw domain_error("DeRhamParams: a must lie in (0, 1)");
    if (a == 0.5) throw domain_error("DeRhamParams: a = 1/2 has no singular velocity");
  }
  /// Parameters with velocity order beta, i.e. a = 2^-beta.
  static DeRhamParams from_beta(double beta) { return DeRhamParams(std::exp2(-beta)); }

  double a() const noexcept { return a_; }
  /// Velocity order -log2(a).
  double beta() const noexcept { return -std::log2(a_); }

private:
  double a_;
};

namespace detail {
inline void check_weight(double a) {
  if (!(a > 0.0 && a < 1.0)) throw domain_error("De Rham weight must lie in (0, 1)");
}
}  // namespace detail

/// R_a(x) by `depth` applications of the functional equation. The residual
/// argument after the last step is mapped through the identity, so the
/// error is at most max(a, 1 - a)^depth and a = 1/2 reproduces x exactly.
inline double derham_eval_recursive(const ExactScalar& x, double a, int depth) {
  detail::check_weight(a);
  if (!x.in_unit_interval()) throw domain_error("derham_eval_recursive: x outside [0, 1]");
  double acc = 0.0;
  double scale = 1.0;
  ExactScalar y = x;
  for (int k = 0; k < depth; ++k) {
    if (y.num() == 0) return acc;
    if (y.num() == y.den()) return acc + scale;
    if (y.below_half()) {
      scale *= a;
    } else {
      acc += scale * a;
      scale *= 1.0 - a;
    }
    y = y.doubled_mod();
  }
  return acc + scale * y.value();
}

inline double derham_eval_recursive(const ExactScalar& x, const DeRhamParams& p, int depth) {
  return derham_eval_recursive(x, p.a(), depth);
}

/// Same recursion on a double argument. Doubling is exact in binary floating
/// point, so every double in [0, 1] is handled as the dyadic it is.
inline double derham_eval_recursive(double x, double a, int depth) {
  detail::check_weight(a);
  if (!(x >= 0.0 && x <= 1.0)) throw domain_error("derham_eval_recursive: x outside [0, 1]");
  double acc = 0.0;
  double scale = 1.0;
  for (int k = 0; k < depth; ++k) {
    if (x == 0.0) return acc;
    if (x == 1.0) return acc + scale;
    if (x < 0.5) {
      scale *= a;
      x = 2.0 * x;
    } else {
      acc += scale * a;
      scale *= 1.0 - a;
      x = 2.0 * x - 1.0;
    }
  }
  return acc + scale * x;
}

/// Lomnicki-Ulam sum  sum_k d_k a (1-a)^(s_k - 1) a^(k - s_k),  s_k = d_1 + ... + d_k.
/// Exact for terminating expansions; see arithmetic_truncation_bound otherwise.
inline double derham_eval_arithmetic(const DyadicNumber& x, double a) {
  detail::check_weight(a);
  if (x.depth() < 1) throw domain_error("derham_eval_arithmetic: empty expansion");
  double sum = 0.0;
  int s = 0;
  for (int k = 1; k <= x.depth(); ++k) {
    if (!x.digits[static_cast<size_t>(k - 1)]) continue;
    ++s;
    // (a / (1 - a)) * a^(k - s) * (1 - a)^s without dividing by 1 - a.
    sum += a * std::pow(1.0 - a, s - 1) * std::pow(a, k - s);
  }
  return sum;
}

inline double derham_eval_arithmetic(const DyadicNumber& x, const DeRhamParams& p) {
  return derham_eval_arithmetic(x, p.a());
}

/// Worst-case error of the Lomnicki-Ulam sum truncated after `depth` digits.
inline double arithmetic_truncation_bound(double a, int depth) {
  const double m = std::max(a, 1.0 - a);
  return (a / (1.0 - a)) * std::pow(m, depth) / (1.0 - m);
}

/// Closed-form forward velocity of R_a of order beta = -log2 a:
/// (2^beta - 1)^(s - 1) when x is a dyadic rational terminating within
/// `depth` digits (s its digit sum), 0 otherwise.
inline double derham_velocity_exact(const ExactScalar& x, const DeRhamParams& p, int depth) {
  if (!(x.num() >= 0 && x.num() < x.den()))
    throw domain_error("derham_velocity_exact: x outside [0, 1)");
  const DyadicNumber d = dyadic_expand(x, depth);
  if (!d.terminating) return 0.0;
  return std::pow(std::exp2(p.beta()) - 1.0, d.digit_sum() - 1);
}

/// d_0 = 1;  d_n(x) = d_{n-1}(2x) for x < 1/2,  (2^a - 1) d_{n-1}(2x - 1) otherwise.
/// Equals (2^a - 1)^(s_n) with s_n the sum of the first n binary digits of x.
inline double dn_recursion(const ExactScalar& x, double a_exp, int n) {
  if (!x.in_unit_interval()) throw domain_error("dn_recursion: x outside [0, 1]");
  if (!(a_exp > 0.0)) throw domain_error("dn_recursion: exponent must be positive");
  if (n < 0) throw domain_error("dn_recursion: n must be >= 0");
  const double factor = std::exp2(a_exp) - 1.0;
  double d = 1.0;
  ExactScalar y = x;
  for (int k = 0; k < n; ++k) {
    if (!y.below_half()) d *= factor;
    y = y.doubled_mod();
  }
  return d;
}

/// dn_recursion divided by (2^a - 1); matches the closed-form exponent s - 1.
inline double dn_normalized(const ExactScalar& x, double a_exp, int n) {
  return dn_recursion(x, a_exp, n) / (std::exp2(a_exp) - 1.0);
}

/// r_0(x) = x^a;  r_n(x) = w r_{n-1}(2x) for x < 1/2,  (1 - w) r_{n-1}(2x - 1) + w
/// otherwise, with w = 2^-a. Converges to R_w pointwise.
inline double rn_iterate(const ExactScalar& x, double a_exp, int n) {
  if (!x.in_unit_interval()) throw domain_error("rn_iterate: x outside [0, 1]");
  if (!(a_exp > 0.0 && a_exp <= 1.0)) throw domain_error("rn_iterate: exponent must lie in (0, 1]");
  if (n < 0) throw domain_error("rn_iterate: n must be >= 0");
  const double w = std::exp2(-a_exp);
  double acc = 0.0;
  double scale = 1.0;
  ExactScalar y = x;
  for (int k = 0; k < n; ++k) {
    if (y.below_half()) {
      scale *= w;
    } else {
      acc += scale * w;
      scale *= 1.0 - w;
    }
    y = y.doubled_mod();
  }
  return acc + scale * std::pow(y.value(), a_exp);
}

/// Strictly decreasing null sequence of scales.
struct ScaleSequence {
  std::vector<double> epsilons;
  double alpha = 1.0;
};

/// eps_n = (prod_{k<=n} factor_k)^(-1/alpha). Every factor must exceed 1,
/// otherwise the iterated map is not expanding in scale and no sequence exists.
inline ScaleSequence scale_regularizing_sequence(const std::vector<double>& derivative_factors,
                                                 double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw domain_error("scale_regularizing_sequence: alpha must lie in (0, 1]");
  ScaleSequence out;
  out.alpha = alpha;
  double log_prod = 0.0;
  for (double f : derivative_factors) {
    if (!(f > 1.0))
      throw hypothesis_error("scale_regularizing_sequence: factor " + std::to_string(f) +
                             " is not > 1");
    log_prod += std::log2(f);
    out.epsilons.push_back(std::exp2(-log_prod / alpha));
  }
  return out;
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Fraction of random binary records t = 0.d_1 d_2 ... d_flips with t <= x,
/// where each digit is 1 with probability 1 - a (0 with probability a). This
/// encoding gives P{t <= x} -> R_a(x), e.g. P{t <= 1/2} = P{d_1 = 0} = a.
inline MonteCarloEstimate mc_derham_estimate(double x, double a, long trials, int flips,
                                             std::uint64_t seed) {
  detail::check_weight(a);
  if (!(x >= 0.0 && x <= 1.0)) throw domain_error("mc_derham_estimate: x outside [0, 1]");
  if (trials < 1 || flips < 1) throw domain_error("mc_derham_estimate: trials and flips must be >= 1");
  std::mt19937_64 rng(seed);
  const double p_one = 1.0 - a;
  long hits = 0;
  for (long i = 0; i < trials; ++i) {
    double t = 0.0;
    double w = 0.5;
    for (int k = 0; k < flips; ++k) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u < p_one) t += w;
      w *= 0.5;
    }
    if (t <= x) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

/// R_a at iteration depth `depth` as a Signal on [0, 1], extended outside the
/// unit interval by R(x + m) = R(x) + m so forward differences near 1 stay defined.
inline Signal derham_signal(double a, int depth) {
  detail::check_weight(a);
  Signal s;
  s.eval = [a, depth](double x) {
    const double m = std::floor(x);
    const double frac = x - m;
    return m + derham_eval_recursive(frac, a, depth);
  };
  s.domain_lo = 0.0;
  s.domain_hi = 1.0;
  s.name = "derham";
  return s;
}

}  // namespace fracvel
