// Acceptance harness: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>
#include <vector>

#include "cli_harness.hpp"
#include "fracvel/fracvel.hpp"
#include "fracvel/signal_spec.hpp"

using namespace fracvel;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %2d: %s  %s | %s\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<ExactScalar> depth4() {
  std::vector<ExactScalar> g;
  for (int p = 1; p < 16; ++p) g.push_back(ExactScalar::dyadic(p, 4));
  return g;
}

void criterion1() {
  const DeRhamParams p(0.25);
  bool ok = true;
  std::set<double> values;
  for (const auto& x : depth4()) {
    const int s = dyadic_expand(x, 4).digit_sum();
    const double v = derham_velocity_exact(x, p, 4);
    double expect = 1.0;
    for (int i = 1; i < s; ++i) expect *= 3.0;
    ok = ok && v == expect;
    values.insert(v);
  }
  ok = ok && values == std::set<double>{1, 3, 9, 27};
  report(1, ok, "De Rham exact velocity table, a = 1/4", fmt("15 dyadics, %g distinct values", values.size()));
}

void criterion2() {
  bool ok = true;
  double worst = 0.0;
  double worst_ratio = 0.0;
  for (double a : {0.25, 0.3, 0.4}) {
    const DeRhamParams p(a);
    const Signal f = derham_signal(a, 30);
    for (const auto& x : depth4()) {
      const auto v = fractional_velocity(f, x.value(), p.beta(), Side::forward, 0.5);
      const double ref = derham_velocity_exact(x, p, 4);
      const double rel = std::abs(v.value() - ref) / ref;
      if (!v.converged() || rel > 0.05) ok = false;
      if (rel > worst) {
        worst = rel;
        worst_ratio = v.value() / ref;
      }
    }
  }
  report(2, ok, "numeric De Rham velocity vs closed form within 5%, a in {0.25, 0.3, 0.4}",
         fmt("worst relative error %.4g (numeric/closed = %.6g)", worst, worst_ratio));
}

void criterion3() {
  const double a = 0.7;
  const DeRhamParams p(a);
  const Signal f = derham_signal(a, 30);
  bool ok = true;
  std::string detail;
  for (int q : {3, 5}) {
    const std::int64_t num = (std::int64_t{1} << 24) / q;
    const double x = ExactScalar::dyadic(num, 24).value();
    const auto v = fractional_velocity(f, x, p.beta(), Side::forward, 0.5);
    ok = ok && v.converged() && std::abs(v.value()) < 1e-3;
    detail += fmt("x=1/%g: %.3g (converged %g)  ", q, v.value(), v.converged());
  }
  report(3, ok, "velocity vanishes off the dyadics, a = 0.7", detail);
}

void criterion4() {
  const Signal f = power_signal(0.5);
  double worst = 0.0;
  for (double eps : {0.5, 0.1, 0.01, 0.001})
    worst = std::max(worst, std::abs(fracvar(f, 0.0, FracOrder(0.5), eps, Side::forward) - 1.0));
  report(4, worst <= 1e-12, "scale invariance of fracvar for t^0.5", fmt("max |value - 1| = %.3g", worst));
}

void criterion5() {
  bool ok = true;
  double worst = 0.0;
  for (const char* spec : {"poly:1,0,0", "exp", "poly:1,0,1,0"})
    for (double b : {0.25, 0.5, 0.75}) {
      const auto r = limit_equivalence_check(parse_signal(spec), 1.0, b);
      const double d = std::abs(r.fractional.value - r.scale.value);
      worst = std::max(worst, d);
      ok = ok && r.agree && r.fractional.converged && r.scale.converged && d < 1e-5;
    }
  report(5, ok, "fractal-variation and scale-velocity limits agree", fmt("max |difference| = %.3g", worst));
}

void criterion6() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (const char* spec : {"poly:1,0", "poly:1"}) {
    const Signal f = parse_signal(spec);
    std::vector<double> r;
    for (int n : {256, 512, 1024, 2048}) r.push_back(bridge_theorem_check(f, 0, 0.5, 0.3, 0.6, 0.05, n).residual);
    bool dec = true;
    for (size_t i = 1; i < r.size(); ++i) dec = dec && r[i] <= 1.2 * r[i - 1];
    ok = ok && r.back() < 1e-3 && dec;
    detail += std::string(spec) + ": r(256..2048) =";
    for (double v : r) detail += fmt(" %.3g", v);
    detail += dec ? " decreasing; " : " not decreasing; ";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  ok = ok && secs < 10.0;
  detail += fmt("time %.2fs", secs);
  report(6, ok, "bridge theorem residuals for f = t and f = 1", detail);

  std::string info;
  for (int n : {256, 512, 1024, 2048})
    info += fmt("%.3g ", bridge_theorem_check(parse_signal("poly:1,0,0"), 0, 0.5, 0.3, 0.6, 0.05, n).residual);
  std::printf("    info: f = t^2 residuals at 256..2048 nodes: %s\n", info.c_str());
}

void criterion7() {
  bool ok = true;
  std::string detail;
  struct Case {
    const char* spec;
    double beta, x;
  };
  for (const Case c : {Case{"poly:1,0,0", 0.5, 1.0}, Case{"sin", 0.25, 0.8}}) {
    const Signal f = parse_signal(c.spec);
    const auto r512 = inversion_check(f, c.beta, {0, c.x, 512});
    const auto r2048 = inversion_check(f, c.beta, {0, c.x, 2048});
    const double m512 = std::max(r512.left, r512.right);
    const double m2048 = std::max(r2048.left, r2048.right);
    ok = ok && m512 < 5e-3 && m2048 < 2.5e-3;
    detail += std::string(c.spec) + fmt(": %.3g @512, %.3g @2048  ", m512, m2048);
  }
  report(7, ok, "inversion identities", detail);
}

void criterion8() {
  const auto half = holder_exponent(abs_power_signal(0.5, 0.0), 0.0, 1e-6, 1e-1, 20);
  const auto lin = holder_exponent(polynomial_signal({1, 0}), 0.3, 1e-6, 1e-1, 20);
  const auto dr = holder_exponent(derham_signal(0.25, 30), 0.0, std::exp2(-20), std::exp2(-4), 17);
  const bool ok = std::abs(half.alpha_hat - 0.5) <= 0.02 && std::abs(lin.alpha_hat - 1.0) <= 0.02 &&
                  std::abs(dr.alpha_hat - 2.0) <= 0.1;
  report(8, ok, "Holder exponent recovery",
         fmt("|t|^0.5: %.4f, t: %.4f, De Rham a=1/4: %.4f", half.alpha_hat, lin.alpha_hat, dr.alpha_hat));
}

void criterion9() {
  bool ok = true;
  double worst = 0.0;
  for (double a : {0.25, 0.5})
    for (double x : {0.25, 0.5, 0.75}) {
      const auto mc = mc_derham_estimate(x, a, 100000, 53, 0);
      const double ref = derham_eval_recursive(x, a, 60);
      const double z = std::abs(mc.estimate - ref) / mc.std_error;
      worst = std::max(worst, z);
      ok = ok && z <= 3.0;
    }
  report(9, ok, "Monte Carlo De Rham construction", fmt("max deviation %.3g standard errors", worst));
}

void criterion10() {
  bool ok = true;
  std::string detail;
  const auto k4 = harness::run({"dn-profile", "--k", "4", "--grid-depth", "4"});
  const auto k8 = harness::run({"dn-profile", "--k", "8", "--grid-depth", "4"});
  const bool refines = k4.status == 0 && k8.status == 0 && k4.out == k8.out &&
                       harness::parse_csv(k4.out).rows.size() == 16;
  ok = ok && refines;
  detail += refines ? "dn-profile k=8 refines k=4; " : "dn-profile k=8 does not refine k=4; ";

  int sweeps = 0;
  for (const char* a : {"0.5", "0.2", "0.25"})
    for (const char* depth : {"6", "24"}) {
      const auto r = harness::run({"derham-eval", "--a", a, "--grid", "256", "--depth", depth});
      const auto csv = harness::parse_csv(r.out);
      bool good = r.status == 0 && csv.rows.size() == 257;
      for (size_t i = 1; good && i < csv.rows.size(); ++i) good = csv.rows[i][1] >= csv.rows[i - 1][1];
      good = good && csv.rows.front()[0] == 0.0 && csv.rows.front()[1] == 0.0;
      good = good && csv.rows[128][0] == 0.5 && csv.rows[128][1] == std::stod(a);
      good = good && csv.rows.back()[0] == 1.0 && csv.rows.back()[1] == 1.0;
      ok = ok && good;
      sweeps += good;
    }
  detail += fmt("derham-eval monotone with exact anchors in %g of 6 sweeps", sweeps);
  report(10, ok, "figure-shape checks", detail);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
