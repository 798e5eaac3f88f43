#pragma once

// Fractal variation, fractional velocity, scale velocity and friends.
//
// For a signal f, point x and scale eps > 0 the forward fractal variation of
// mixed order n + beta is
//
//   (n+1)! (f(x + eps) - T_n(x, eps)) / eps^(n+beta),
//
// with T_n the Taylor polynomial of f at x; the fractional velocity is its
// eps -> 0 limit. The scale velocity replaces the difference by a derivative
// in the scale variable:  eps^beta d/deps f(x + eps) / (1 - {beta}).

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "fracvel/errors.hpp"
#include "fracvel/exact_scalar.hpp"
#include "fracvel/numeric_core.hpp"
#include "fracvel/signal.hpp"

namespace fracvel {

enum class Side { forward, backward };

inline const char* to_string(Side s) noexcept { return s == Side::forward ? "forward" : "backward"; }

/// A point (x, eps) of scale space with the value observed there.
struct ScaleSample {
  double x = 0.0;
  double epsilon = 1.0;
  double value = 0.0;
};

struct VelocityEstimate {
  /// Total order n + beta (or the bare increment exponent).
  double order = 1.0;
  /// Taylor order n subtracted before dividing.
  int taylor_order = 0;
  Side side = Side::forward;
  LimitResult result;
  /// Scales eps_k actually visited.
  std::vector<double> epsilons;

  double value() const noexcept { return result.value; }
  bool converged() const noexcept { return result.converged; }
};

namespace detail {

inline void check_eps(double eps) {
  if (!(eps > 0.0)) throw domain_error("scale eps must be positive");
}

inline double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

// T_n(x, h) = f(x) + sum_k f^(k)(x) h^k / k!
inline double taylor(const Signal& f, double x, int n, double h) {
  double sum = checked_eval(f.eval, x);
  double term = 1.0;
  for (int k = 1; k <= n; ++k) {
    term *= h / k;
    sum += checked_eval(f.derivative(k), x) * term;
  }
  return sum;
}

}  // namespace detail

/// Fractal variation of mixed order n + beta at scale eps.
inline double fracvar(const Signal& f, double x, const FracOrder& order, double eps, Side side) {
  detail::check_eps(eps);
  const int n = order.n();
  for (int k = 1; k <= n; ++k) (void)f.derivative(k);  // contract check
  const double fact = detail::factorial(n + 1);
  const double scale = std::pow(eps, order.total());
  if (side == Side::forward) {
    return fact * ((checked_eval(f.eval, x + eps) - detail::taylor(f, x, n, eps)) / scale);
  }
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * fact * ((detail::taylor(f, x, n, -eps) - checked_eval(f.eval, x - eps)) / scale);
}

/// Plain increment quotient (f(x+eps) - f(x)) / eps^exponent (forward) or
/// (f(x) - f(x-eps)) / eps^exponent (backward) for any exponent > 0. This is
/// the n = 0 fractal variation without the beta <= 1 restriction, needed for
/// singular signals whose local order exceeds 1.
inline double increment_quotient(const Signal& f, double x, double exponent, double eps, Side side) {
  detail::check_eps(eps);
  if (!(exponent > 0.0)) throw domain_error("increment_quotient: exponent must be positive");
  const double fx = checked_eval(f.eval, x);
  const double diff = side == Side::forward ? checked_eval(f.eval, x + eps) - fx
                                            : fx - checked_eval(f.eval, x - eps);
  return diff / std::pow(eps, exponent);
}

namespace detail {

template <class Quotient>
VelocityEstimate velocity_limit(Quotient&& q, double order, int n, Side side, double eps0,
                                double tol, int max_terms) {
  check_eps(eps0);
  VelocityEstimate est;
  est.order = order;
  est.taylor_order = n;
  est.side = side;
  est.result = limit_extrapolate(
      [&](int k) {
        const double eps = std::ldexp(eps0, -k);
        est.epsilons.push_back(eps);
        return q(eps);
      },
      tol, max_terms);
  return est;
}

}  // namespace detail

/// Fractional velocity: limit of the fractal variation along eps_k = eps0 * 2^-k.
/// Divergence or a limit not reached within max_terms is reported through
/// result.converged, never as a value.
inline VelocityEstimate fractional_velocity(const Signal& f, double x, const FracOrder& order,
                                            Side side, double eps0 = defaults::eps0,
                                            double tol = defaults::tol,
                                            int max_terms = defaults::max_terms) {
  return detail::velocity_limit([&](double eps) { return fracvar(f, x, order, eps, side); },
                                order.total(), order.n(), side, eps0, tol, max_terms);
}

/// Velocity of bare order `exponent` (see increment_quotient).
inline VelocityEstimate fractional_velocity(const Signal& f, double x, double exponent, Side side,
                                            double eps0 = defaults::eps0,
                                            double tol = defaults::tol,
                                            int max_terms = defaults::max_terms) {
  return detail::velocity_limit(
      [&](double eps) { return increment_quotient(f, x, exponent, eps, side); }, exponent, 0, side,
      eps0, tol, max_terms);
}

/// d/deps f(x + eps) (forward) or d/deps f(x - eps) = -f'(x - eps) (backward).
/// Uses the analytic f' when supplied, otherwise a central difference in eps
/// with step 1e-6 * eps so the stencil never crosses x.
inline double scale_derivative(const Signal& f, double x, double eps, Side side) {
  detail::check_eps(eps);
  const double sgn = side == Side::forward ? 1.0 : -1.0;
  if (f.has_derivative(1)) return sgn * checked_eval(f.derivatives.front(), x + sgn * eps);
  return central_diff([&](double e) { return f.eval(x + sgn * e); }, eps,
                      defaults::fd_delta * eps);
}

/// Scale velocity eps^beta d/deps f(x +- eps) / (1 - {beta}), beta in (0, 1].
inline double scale_velocity(const Signal& f, double x, double beta, double eps, Side side) {
  if (!(beta > 0.0 && beta <= 1.0)) throw domain_error("scale_velocity: beta must lie in (0, 1]");
  detail::check_eps(eps);
  return std::pow(eps, beta) * scale_derivative(f, x, eps, side) / (1.0 - frac_part(beta));
}

struct EquivalenceResult {
  LimitResult fractional;  ///< limit of the fractal variation of order 1 - beta
  LimitResult scale;       ///< limit of the scale velocity of order beta
  bool agree = false;
  /// Non-empty when f' was found to vanish near x (hypothesis not met).
  std::string warning;
};

/// Runs the fractal-variation limit of order 1 - beta and the scale-velocity
/// limit of order beta on the same scales and compares them. The two agree
/// when f' is continuous and non-vanishing on (x, x +- eps0]; that is checked
/// by sampling and reported in `warning`. Backward scale velocities carry the
/// sign of d/deps f(x - eps), so they are negated before comparison.
inline EquivalenceResult limit_equivalence_check(const Signal& f, double x, double beta,
                                                 double eps0 = defaults::eps0,
                                                 double tol = defaults::tol,
                                                 Side side = Side::forward,
                                                 int max_terms = defaults::max_terms) {
  if (!(beta > 0.0 && beta < 1.0)) throw domain_error("limit_equivalence_check: beta must lie in (0, 1)");
  detail::check_eps(eps0);
  EquivalenceResult out;
  const double sgn = side == Side::forward ? 1.0 : -1.0;

  constexpr int samples = 32;
  for (int i = 0; i <= samples; ++i) {
    const double eps = eps0 * std::exp2(-static_cast<double>(max_terms) * i / samples);
    if (f.first_derivative(x + sgn * eps) == 0.0) {
      out.warning = "f' vanishes at " + std::to_string(x + sgn * eps) +
                    "; equivalence hypothesis not met";
      break;
    }
  }

  out.fractional = fractional_velocity(f, x, FracOrder(1.0 - beta), side, eps0, tol, max_terms).result;
  out.scale = limit_extrapolate(
      [&](int k) { return sgn * scale_velocity(f, x, beta, std::ldexp(eps0, -k), side); }, tol,
      max_terms);
  out.agree = out.fractional.converged && out.scale.converged &&
              std::abs(out.fractional.value - out.scale.value) < 10.0 * tol;
  return out;
}

struct ChangePoint {
  ExactScalar x;
  VelocityEstimate estimate;
};

namespace detail {

template <class Estimator>
std::vector<ChangePoint> scan(const std::vector<ExactScalar>& grid, double threshold,
                              Estimator&& estimate) {
  if (!(threshold > 0.0)) throw domain_error("set_of_change_scan: threshold must be positive");
  std::vector<ChangePoint> out;
  for (const ExactScalar& x : grid) {
    VelocityEstimate est = estimate(x.value());
    if (est.converged() && std::abs(est.value()) > threshold) out.push_back({x, std::move(est)});
  }
  return out;
}

}  // namespace detail

inline constexpr double default_change_threshold = 1e-4;

/// Grid points where the fractional velocity converged to a value of
/// magnitude above `threshold`.
inline std::vector<ChangePoint> set_of_change_scan(const Signal& f,
                                                   const std::vector<ExactScalar>& grid,
                                                   const FracOrder& order, Side side,
                                                   double eps0 = defaults::eps0,
                                                   double tol = defaults::tol,
                                                   double threshold = default_change_threshold,
                                                   int max_terms = defaults::max_terms) {
  return detail::scan(grid, threshold, [&](double x) {
    return fractional_velocity(f, x, order, side, eps0, tol, max_terms);
  });
}

inline std::vector<ChangePoint> set_of_change_scan(const Signal& f,
                                                   const std::vector<ExactScalar>& grid,
                                                   double exponent, Side side,
                                                   double eps0 = defaults::eps0,
                                                   double tol = defaults::tol,
                                                   double threshold = default_change_threshold,
                                                   int max_terms = defaults::max_terms) {
  return detail::scan(grid, threshold, [&](double x) {
    return fractional_velocity(f, x, exponent, side, eps0, tol, max_terms);
  });
}

struct HolderFit {
  double alpha_hat = 0.0;
  double r_squared = 0.0;
  int samples_used = 0;
};

/// Least-squares slope of log|f(x +- eps) - f(x)| against log eps over
/// `points` geometrically spaced scales in [eps_min, eps_max]. Samples with a
/// zero increment are dropped; fewer than 4 survivors is an error.
inline HolderFit holder_exponent(const Signal& f, double x, double eps_min, double eps_max,
                                 int points, Side side = Side::forward) {
  if (!(eps_min > 0.0 && eps_min < eps_max)) throw domain_error("holder_exponent: need 0 < eps_min < eps_max");
  if (points < 4) throw domain_error("holder_exponent: need at least 4 points");
  const double lo = std::log2(eps_min);
  const double step = (std::log2(eps_max) - lo) / (points - 1);
  const double fx = checked_eval(f.eval, x);
  std::vector<double> xs;
  std::vector<double> ys;
  for (int i = 0; i < points; ++i) {
    const double eps = std::exp2(lo + step * i);
    const double fy = checked_eval(f.eval, side == Side::forward ? x + eps : x - eps);
    const double inc = std::abs(fy - fx);
    if (inc == 0.0) continue;
    xs.push_back(std::log(eps));
    ys.push_back(std::log(inc));
  }
  const auto m = static_cast<double>(xs.size());
  if (xs.size() < 4) throw estimation_error("holder_exponent: fewer than 4 nonzero increments");
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  HolderFit fit;
  fit.alpha_hat = sxy / sxx;
  const double ss_res = syy - fit.alpha_hat * sxy;
  fit.r_squared = syy > 0.0 ? 1.0 - std::max(ss_res, 0.0) / syy : 1.0;
  fit.samples_used = static_cast<int>(xs.size());
  return fit;
}

}  // namespace fracvel
