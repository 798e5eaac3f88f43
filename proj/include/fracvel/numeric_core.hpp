#pragma once

// Shared numerical primitives: mixed differentiation orders, finite
// differences, extrapolated sequence limits and the gamma function.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "fracvel/errors.hpp"

namespace fracvel {

/// Mixed order n + beta with integer part n >= 0 and beta in (0, 1].
class FracOrder {
public:
  FracOrder(int n, double beta) : n_(n), beta_(beta) {
    if (n < 0) throw domain_error("FracOrder: integer part must be >= 0");
    if (!(beta > 0.0 && beta <= 1.0)) throw domain_error("FracOrder: beta must lie in (0, 1]");
  }
  /// Purely fractional order beta (n = 0).
  explicit FracOrder(double beta) : FracOrder(0, beta) {}

  int n() const noexcept { return n_; }
  double beta() const noexcept { return beta_; }
  double total() const noexcept { return n_ + beta_; }
  /// {beta}: zero for beta == 1, otherwise beta itself.
  double frac_part() const noexcept { return beta_ - std::floor(beta_); }

  friend bool operator==(const FracOrder&, const FracOrder&) = default;

private:
  int n_;
  double beta_;
};

/// Fractional part {v} = v - floor(v).
inline double frac_part(double v) noexcept { return v - std::floor(v); }

/// Outcome of an extrapolated limit. `residuals` holds |A_k - A_{k-1}| for
/// the accelerated values A_k; `diagnostic` is empty unless something went wrong.
struct LimitResult {
  double value = 0.0;
  bool converged = false;
  std::vector<double> residuals;
  int terms_used = 0;
  std::string diagnostic;
};

namespace defaults {
inline constexpr double eps0 = 0.25;
inline constexpr double tol = 1e-6;
inline constexpr double fd_delta = 1e-6;
inline constexpr int max_terms = 30;
/// Consecutive growing residuals after which a limit is declared divergent.
inline constexpr int divergence_run = 3;
}  // namespace defaults

/// Relative finite-difference step max(delta*|t|, delta).
inline double relative_step(double t, double delta = defaults::fd_delta) noexcept {
  return std::max(delta * std::abs(t), delta);
}

template <class F>
double checked_eval(F&& f, double t) {
  const double v = f(t);
  if (!std::isfinite(v)) throw evaluation_error("non-finite function value", t);
  return v;
}

/// Symmetric difference quotient (f(t+h) - f(t-h)) / 2h.
template <class F>
double central_diff(F&& f, double t, double h) {
  if (!(h > 0.0)) throw domain_error("central_diff: step must be positive");
  const double fp = checked_eval(f, t + h);
  const double fm = checked_eval(f, t - h);
  return (fp - fm) / (2.0 * h);
}

template <class F>
double central_diff(F&& f, double t) {
  return central_diff(std::forward<F>(f), t, relative_step(t));
}

namespace detail {

// One Aitken delta-squared step. Falls back to the newest term when the
// second difference is at rounding level or the estimated contraction ratio
// is not in (-1, 1), where the geometric-tail model does not apply.
inline double aitken(double s0, double s1, double s2) noexcept {
  const double d1 = s1 - s0;
  const double d2 = s2 - s1;
  const double denom = d2 - d1;
  const double scale = std::abs(s0) + std::abs(s1) + std::abs(s2);
  if (denom == 0.0 || std::abs(denom) <= 64.0 * 2.220446049250313e-16 * scale) return s2;
  if (d1 == 0.0 || std::abs(d2) >= std::abs(d1)) return s2;
  return s2 - d2 * d2 / denom;
}

}  // namespace detail

/// Limit of k -> seq(k), k = 0, 1, ..., max_terms, accelerated with Aitken's
/// delta-squared process. Converged once two consecutive accelerated values
/// differ by less than `tol`. A sequence that never gets there is reported as
/// diverging when its raw successive differences |seq(k) - seq(k-1)| grew
/// `defaults::divergence_run` times in a row at some point, and as merely
/// unconverged otherwise. Growth is not a reason to stop early: smooth signals
/// at orders near 1 rise for a few scales before the leading term takes over.
/// The last accelerated value is returned either way.
template <class Seq>
LimitResult limit_extrapolate(Seq&& seq, double tol = defaults::tol,
                              int max_terms = defaults::max_terms) {
  if (!(tol > 0.0)) throw domain_error("limit_extrapolate: tol must be positive");
  if (max_terms < 1) throw domain_error("limit_extrapolate: need at least 2 terms");

  LimitResult out;
  std::vector<double> raw;
  std::vector<double> acc;
  raw.reserve(static_cast<size_t>(max_terms) + 1);
  int growing = 0;
  int longest_growth = 0;
  int growth_end = -1;
  double last_step = 0.0;

  for (int k = 0; k <= max_terms; ++k) {
    const double s = seq(k);
    if (!std::isfinite(s)) throw evaluation_error("non-finite sequence term", k);
    raw.push_back(s);
    const size_t m = raw.size();
    acc.push_back(m < 3 ? s : detail::aitken(raw[m - 3], raw[m - 2], raw[m - 1]));
    out.terms_used = static_cast<int>(m);
    out.value = acc.back();
    if (m < 2) continue;

    const double step = std::abs(raw[m - 1] - raw[m - 2]);
    growing = (m > 2 && step > last_step) ? growing + 1 : 0;
    last_step = step;
    if (growing >= defaults::divergence_run && growing >= longest_growth) {
      longest_growth = growing;
      growth_end = k;
    }

    const double r = std::abs(acc[m - 1] - acc[m - 2]);
    out.residuals.push_back(r);
    if (r < tol) {
      out.converged = true;
      return out;
    }
  }
  if (growth_end >= 0) {
    out.diagnostic = "diverging: successive differences grew " + std::to_string(longest_growth) +
                     " times in a row up to k=" + std::to_string(growth_end);
  } else {
    out.diagnostic = "not converged within " + std::to_string(max_terms) + " terms";
  }
  return out;
}

/// Euler gamma function; throws at the poles 0, -1, -2, ...
inline double gamma(double x) {
  if (x <= 0.0 && x == std::floor(x)) throw domain_error("gamma: pole at non-positive integer");
  return std::tgamma(x);
}

/// eps0 * 2^-k for k = 0..count-1.
inline std::vector<double> geometric_epsilons(double eps0, int count) {
  std::vector<double> eps(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) eps[static_cast<size_t>(k)] = std::ldexp(eps0, -k);
  return eps;
}

}  // namespace fracvel
