#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "fracvel/errors.hpp"
#include "fracvel/numeric_core.hpp"

namespace fracvel {

using RealMap = std::function<double(double)>;

/// A real-valued signal on a declared domain, optionally carrying its
/// analytic derivatives f', f'', ... in `derivatives` (entry 0 is f').
///
/// Operations may call `eval` from several threads; callers must supply
/// maps that tolerate concurrent invocation.
struct Signal {
  RealMap eval;
  std::vector<RealMap> derivatives;
  double domain_lo = -std::numeric_limits<double>::infinity();
  double domain_hi = std::numeric_limits<double>::infinity();
  std::string name;

  double operator()(double t) const { return eval(t); }

  bool has_derivative(int order) const noexcept {
    return order >= 1 && static_cast<size_t>(order) <= derivatives.size();
  }

  /// j-th derivative (j >= 1); throws contract_error if not supplied.
  const RealMap& derivative(int order) const {
    if (!has_derivative(order))
      throw contract_error("signal '" + name + "' has no analytic derivative of order " +
                           std::to_string(order));
    return derivatives[static_cast<size_t>(order - 1)];
  }

  /// f'(t): analytic when available, otherwise a central difference.
  double first_derivative(double t) const {
    if (has_derivative(1)) return checked_eval(derivatives.front(), t);
    return central_diff(eval, t);
  }
};

/// Spot-checks every supplied derivative against a central difference of the
/// next lower derivative at three interior points of [lo, hi]. Returns an
/// empty string on success, otherwise a description of the first mismatch.
inline std::string validate_derivatives(const Signal& f, double lo, double hi,
                                        double rel_tol = 1e-3) {
  const double pts[] = {lo + 0.25 * (hi - lo), lo + 0.5 * (hi - lo), lo + 0.75 * (hi - lo)};
  for (size_t j = 0; j < f.derivatives.size(); ++j) {
    const RealMap& lower = j == 0 ? f.eval : f.derivatives[j - 1];
    for (double t : pts) {
      const double fd = central_diff(lower, t);
      const double an = checked_eval(f.derivatives[j], t);
      const double scale = std::max({std::abs(fd), std::abs(an), 1e-8});
      if (std::abs(fd - an) > rel_tol * scale)
        return "derivative " + std::to_string(j + 1) + " mismatch at t=" + std::to_string(t);
    }
  }
  return {};
}

/// c1*f + c2*g; derivatives are kept up to the shorter of the two stacks.
inline Signal linear_combination(double c1, const Signal& f, double c2, const Signal& g) {
  Signal out;
  out.eval = [=](double t) { return c1 * f.eval(t) + c2 * g.eval(t); };
  const size_t m = std::min(f.derivatives.size(), g.derivatives.size());
  for (size_t j = 0; j < m; ++j) {
    out.derivatives.push_back(
        [=, df = f.derivatives[j], dg = g.derivatives[j]](double t) { return c1 * df(t) + c2 * dg(t); });
  }
  out.domain_lo = std::max(f.domain_lo, g.domain_lo);
  out.domain_hi = std::min(f.domain_hi, g.domain_hi);
  out.name = "lincomb";
  return out;
}

}  // namespace fracvel
