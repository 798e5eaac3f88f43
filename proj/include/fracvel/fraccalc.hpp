#pragma once

// Riemann-Liouville and Caputo differ-integrals by product quadrature.
//
//   I^b f(x)  = 1/Gamma(b)   int_a^x f(t) (x - t)^(b-1) dt
//   C^b f(x)  = 1/Gamma(1-b) int_a^x f'(t) (x - t)^(-b) dt     0 < b < 1
//   D^b f(x)  = d/dx I^(1-b) f(x)                               0 < b < 1
//
// On a uniform mesh the integrand's smooth factor is interpolated (piecewise
// linear for I^b, piecewise constant slopes for C^b) and the kernel is
// integrated exactly on every cell, which absorbs the endpoint singularity.

#include <cmath>
#include <string>
#include <vector>

#include "fracvel/errors.hpp"
#include "fracvel/numeric_core.hpp"
#include "fracvel/scaleops.hpp"
#include "fracvel/signal.hpp"

namespace fracvel {

enum class QuadratureScheme { product_trapezoid };

struct QuadratureSpec {
  double a = 0.0;
  double x = 1.0;
  int nodes = 1024;  ///< mesh points including both endpoints
  QuadratureScheme scheme = QuadratureScheme::product_trapezoid;

  int cells() const noexcept { return nodes - 1; }
  double step() const noexcept { return (x - a) / cells(); }

  void validate() const {
    if (!(a < x)) throw domain_error("quadrature: need a < x");
    if (nodes < 2) throw domain_error("quadrature: need at least 2 nodes");
  }

  QuadratureSpec at(double new_x) const {
    QuadratureSpec s = *this;
    s.x = new_x;
    return s;
  }
};

namespace detail {

inline std::vector<double> sample_mesh(const RealMap& f, double a, double x, int cells) {
  std::vector<double> v(static_cast<size_t>(cells) + 1);
  for (int j = 0; j <= cells; ++j) {
    const double t = j == cells ? x : a + (x - a) * j / cells;
    v[static_cast<size_t>(j)] = checked_eval(f, t);
  }
  return v;
}

/// m^p for m = 0..n.
inline std::vector<double> powers(double p, int n) {
  std::vector<double> out(static_cast<size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) out[static_cast<size_t>(m)] = m == 0 ? 0.0 : std::pow(m, p);
  return out;
}

/// Product-trapezoid weights for I^b at mesh point N, with pw[m] = m^(b+1):
///   I^b f(t_N) ~ h^b / Gamma(b+2) * sum_j w_j f_j.
/// Only f_0..f_N are read, so the same table serves every prefix of the mesh.
inline double rl_sum(const std::vector<double>& f, int n, double beta, double h,
                     const std::vector<double>& pw) {
  if (n == 0) return 0.0;
  const auto N = static_cast<size_t>(n);
  double sum = (pw[N - 1] - (n - 1 - beta) * std::pow(n, beta)) * f[0];
  for (size_t j = 1; j < N; ++j) {
    const size_t m = N - j;
    sum += (pw[m + 1] - 2.0 * pw[m] + pw[m - 1]) * f[j];
  }
  sum += f[N];
  return std::pow(h, beta) * sum / std::tgamma(beta + 2.0);
}

/// L1 sum for C^b at mesh point N from function values, pw[m] = m^(1-b):
///   C^b f(t_N) ~ h^-b / Gamma(2-b) * sum_j (f_{j+1} - f_j) (pw[N-j] - pw[N-j-1]).
inline double l1_sum(const std::vector<double>& f, int n, double beta, double h,
                     const std::vector<double>& pw) {
  if (n == 0) return 0.0;
  const auto N = static_cast<size_t>(n);
  double sum = 0.0;
  for (size_t j = 0; j < N; ++j) sum += (f[j + 1] - f[j]) * (pw[N - j] - pw[N - j - 1]);
  return std::pow(h, -beta) * sum / std::tgamma(2.0 - beta);
}

inline void check_derivative_order(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) throw domain_error("fractional derivative order must lie in (0, 1)");
}

}  // namespace detail

/// Riemann-Liouville integral I^beta f(x) from a, beta > 0.
inline double rl_integral(const Signal& f, double beta, const QuadratureSpec& spec) {
  spec.validate();
  if (!(beta > 0.0)) throw domain_error("rl_integral: beta must be positive");
  const int n = spec.cells();
  const auto vals = detail::sample_mesh(f.eval, spec.a, spec.x, n);
  return detail::rl_sum(vals, n, beta, spec.step(), detail::powers(beta + 1.0, n));
}

/// Caputo derivative C^beta f(x), 0 < beta < 1. With an analytic f' this is
/// I^(1-beta) f' by the product trapezoid; otherwise the L1 scheme on f values.
inline double caputo_derivative(const Signal& f, double beta, const QuadratureSpec& spec) {
  spec.validate();
  detail::check_derivative_order(beta);
  const int n = spec.cells();
  if (f.has_derivative(1)) {
    const auto vals = detail::sample_mesh(f.derivatives.front(), spec.a, spec.x, n);
    return detail::rl_sum(vals, n, 1.0 - beta, spec.step(), detail::powers(2.0 - beta, n));
  }
  const auto vals = detail::sample_mesh(f.eval, spec.a, spec.x, n);
  return detail::l1_sum(vals, n, beta, spec.step(), detail::powers(1.0 - beta, n));
}

/// Riemann-Liouville derivative d/dx I^(1-beta) f(x), 0 < beta < 1. The outer
/// derivative is a central difference in x with relative step 1e-5.
inline double rl_derivative(const Signal& f, double beta, const QuadratureSpec& spec) {
  spec.validate();
  detail::check_derivative_order(beta);
  const double h = relative_step(spec.x, 1e-5);
  if (!(spec.x - h > spec.a)) throw domain_error("rl_derivative: x too close to a");
  return central_diff([&](double y) { return rl_integral(f, 1.0 - beta, spec.at(y)); }, spec.x, h);
}

struct InversionResiduals {
  double left = 0.0;   ///< |C^b I^b f (x) - f(x)|
  double right = 0.0;  ///< |I^b C^b f (x) - (f(x) - f(a))|
};

/// Residuals of the two inversion identities between I^beta and C^beta,
/// evaluated by nested quadrature on a single mesh.
inline InversionResiduals inversion_check(const Signal& f, double beta, const QuadratureSpec& spec) {
  spec.validate();
  detail::check_derivative_order(beta);
  const int n = spec.cells();
  const double h = spec.step();
  const auto N = static_cast<size_t>(n);
  const auto fv = detail::sample_mesh(f.eval, spec.a, spec.x, n);

  // Inner layer on every mesh prefix.
  const auto pw_int = detail::powers(beta + 1.0, n);
  const auto pw_l1 = detail::powers(1.0 - beta, n);
  std::vector<double> integral(N + 1);
  std::vector<double> caputo(N + 1);
  std::vector<double> dv;
  std::vector<double> pw_dv;
  if (f.has_derivative(1)) {
    dv = detail::sample_mesh(f.derivatives.front(), spec.a, spec.x, n);
    pw_dv = detail::powers(2.0 - beta, n);
  }
  for (int j = 0; j <= n; ++j) {
    integral[static_cast<size_t>(j)] = detail::rl_sum(fv, j, beta, h, pw_int);
    caputo[static_cast<size_t>(j)] = dv.empty() ? detail::l1_sum(fv, j, beta, h, pw_l1)
                                                : detail::rl_sum(dv, j, 1.0 - beta, h, pw_dv);
  }

  InversionResiduals r;
  r.left = std::abs(detail::l1_sum(integral, n, beta, h, pw_l1) - fv[N]);
  r.right = std::abs(detail::rl_sum(caputo, n, beta, h, pw_int) - (fv[N] - fv[0]));
  return r;
}

struct BridgeResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};

/// Compares the scale velocity of order alpha of eps -> I^beta f(x + eps)
/// with the closed form
///
///   eps^alpha (x+eps-a)^(beta-1) f(a) / ((1-{alpha}) Gamma(beta))
///     + eps^alpha / (1-{alpha}) * C^(1-beta) f(x + eps).
///
/// With `subtract_boundary` the integral is taken of f - f(a) and the boundary
/// term drops out. f must be C^1 on [a, x + eps + h], h the difference step.
inline BridgeResult bridge_theorem_check(const Signal& f, double a, double x, double alpha,
                                         double beta, double eps, int nodes,
                                         bool subtract_boundary = false) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("bridge_theorem_check: alpha must lie in (0, 1)");
  if (!(beta > 0.0 && beta < 1.0)) throw domain_error("bridge_theorem_check: beta must lie in (0, 1)");
  if (!(eps > 0.0)) throw domain_error("bridge_theorem_check: eps must be positive");
  if (!(a < x)) throw domain_error("bridge_theorem_check: need a < x");
  const QuadratureSpec spec{a, x + eps, nodes};
  spec.validate();

  const double fa = checked_eval(f.eval, a);
  Signal g = f;
  if (subtract_boundary) g.eval = [f, fa](double t) { return f.eval(t) - fa; };

  const double norm = std::pow(eps, alpha) / (1.0 - frac_part(alpha));
  const double y = x + eps;
  const double h = relative_step(y, 1e-5);
  const double d_eps = central_diff([&](double e) { return rl_integral(g, beta, spec.at(e)); }, y, h);

  BridgeResult out;
  out.lhs = norm * d_eps;
  out.rhs = norm * caputo_derivative(f, 1.0 - beta, spec);
  if (!subtract_boundary) out.rhs += norm * std::pow(y - a, beta - 1.0) * fa / std::tgamma(beta);
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

struct LimitPropositionResult {
  /// lim (1/alpha) eps^(1-alpha) C^beta f(x + eps)
  LimitResult caputo_side;
  /// velocity of order alpha of y -> I^(1-beta) [f - f(a)](y) at x
  VelocityEstimate velocity_side;
  bool agree = false;
};

/// Evaluates the Caputo-side limit along eps_k = eps0 2^-k and cross-checks it
/// against the fractional velocity of the shifted integral. x may equal a.
inline LimitPropositionResult limit_proposition_check(const Signal& f, double a, double x,
                                                      double alpha, double beta, int nodes,
                                                      double tol = defaults::tol,
                                                      double eps0 = defaults::eps0,
                                                      int max_terms = defaults::max_terms) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw domain_error("limit_proposition_check: alpha must lie in (0, 1)");
  detail::check_derivative_order(beta);
  if (x < a) throw domain_error("limit_proposition_check: need x >= a");
  if (nodes < 2) throw domain_error("limit_proposition_check: need at least 2 nodes");

  LimitPropositionResult out;
  const QuadratureSpec base{a, x, nodes};
  out.caputo_side = limit_extrapolate(
      [&](int k) {
        const double eps = std::ldexp(eps0, -k);
        return std::pow(eps, 1.0 - alpha) * caputo_derivative(f, beta, base.at(x + eps)) / alpha;
      },
      tol, max_terms);

  const double fa = checked_eval(f.eval, a);
  Signal centred;
  centred.eval = [&f, fa](double t) { return f.eval(t) - fa; };
  Signal shifted;
  shifted.name = "shifted-integral";
  shifted.eval = [&centred, base, beta](double y) {
    return y > base.a ? rl_integral(centred, 1.0 - beta, base.at(y)) : 0.0;
  };
  out.velocity_side = fractional_velocity(shifted, x, FracOrder(alpha), Side::forward, eps0, tol, max_terms);
  out.agree = out.caputo_side.converged && out.velocity_side.converged() &&
              std::abs(out.caputo_side.value - out.velocity_side.value()) < 10.0 * tol;
  return out;
}

}  // namespace fracvel
