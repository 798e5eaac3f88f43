#pragma once

// Subcommand table and dispatcher for the fracvel command-line tool. Kept in
// a header so the tests can drive it without spawning processes.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracvel/fracvel.hpp"
#include "fracvel/signal_spec.hpp"
#include "json.hpp"

namespace fracvel::cli {

enum exit_code : int { ok = 0, domain_failure = 1, no_convergence = 2, usage = 64 };

enum class Format { csv, json };

enum class Kind { real, integer, text };

struct Flag {
  std::string name;  // without leading dashes
  Kind kind;
  std::string default_value;
  std::string help;  // includes units where there are any
};

class usage_error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parsed flags of one subcommand, all kept as text until dispatch.
class Params {
public:
  std::map<std::string, std::string> values;

  const std::string& text(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw usage_error("missing flag --" + name);
    return it->second;
  }
  double real(const std::string& name) const {
    const std::string& s = text(name);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || *end != '\0' || !std::isfinite(v)) throw usage_error("--" + name + ": not a number: " + s);
    return v;
  }
  long integer(const std::string& name) const {
    const std::string& s = text(name);
    char* end = nullptr;
    const long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw usage_error("--" + name + ": not an integer: " + s);
    return v;
  }
  int small_int(const std::string& name) const {
    const long v = integer(name);
    if (v < -1000000000L || v > 1000000000L) throw domain_error("--" + name + " out of range");
    return static_cast<int>(v);
  }
  Side side() const {
    const std::string& s = text("side");
    if (s == "forward") return Side::forward;
    if (s == "backward") return Side::backward;
    throw usage_error("--side must be forward or backward");
  }
};

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> diagnostics;
  bool not_converged = false;
};

struct Subcommand {
  std::string name;
  std::string description;  // includes the CSV schema
  std::vector<Flag> flags;
  std::function<Table(const Params&)> run;
};

struct RunConfig {
  std::string subcommand;
  Params parameters;
  std::optional<std::string> output_path;
  Format format = Format::csv;
  std::uint64_t seed = 0;
};

namespace detail {

inline Flag signal_flag(const std::string& def) {
  return {"f", Kind::text, def,
          "signal: poly:c_n,...,c_0 | pow:p | abs-pow:p@x0 | derham:a@depth | sin | exp"};
}
inline Flag side_flag() { return {"side", Kind::text, "forward", "increment side: forward | backward"}; }
inline Flag eps0_flag() { return {"eps0", Kind::real, "0.25", "first scale of eps_k = eps0 2^-k (length)"}; }
inline Flag tol_flag() { return {"tol", Kind::real, "1e-06", "convergence tolerance on accelerated values (absolute)"}; }
inline Flag terms_flag() { return {"max-terms", Kind::integer, "30", "maximum number of scales (count)"}; }

inline std::vector<Flag> quadrature_flags() {
  return {signal_flag("poly:1,0"),
          {"beta", Kind::real, "0.5", "order (dimensionless)"},
          {"a0", Kind::real, "0", "lower terminal a (abscissa)"},
          {"x", Kind::real, "1", "evaluation point (abscissa)"},
          {"nodes", Kind::integer, "1024", "mesh points including both ends (count)"}};
}

inline QuadratureSpec quadrature(const Params& p) {
  return {p.real("a0"), p.real("x"), p.small_int("nodes")};
}

inline void require_grid(long grid) {
  if (grid < 1 || grid > (1L << 24)) throw domain_error("--grid must lie in [1, 2^24]");
}

inline VelocityEstimate velocity_of(const Signal& f, double x, int n, double beta, Side side,
                                    double eps0, double tol, int terms) {
  // Orders above 1 (De Rham with a < 1/2) use the bare increment quotient.
  if (n == 0 && beta > 1.0) return fractional_velocity(f, x, beta, side, eps0, tol, terms);
  return fractional_velocity(f, x, FracOrder(n, beta), side, eps0, tol, terms);
}

inline void note_limit(Table& t, const std::string& what, const LimitResult& r) {
  if (!r.converged) {
    t.not_converged = true;
    t.diagnostics.push_back(what + ": " + (r.diagnostic.empty() ? "not converged" : r.diagnostic));
  }
}

inline std::vector<double> split_reals(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (item.empty() || *end != '\0') throw usage_error("--" + flag + ": bad list entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw usage_error("--" + flag + ": empty list");
  return out;
}

}  // namespace detail

inline std::vector<Subcommand> subcommands() {
  using detail::signal_flag;
  std::vector<Subcommand> cmds;

  cmds.push_back({"derham-eval",
                  "De Rham function R_a on the uniform grid x = i/grid, i = 0..grid. CSV: x,value",
                  {{"a", Kind::real, "0.25", "weight a in (0,1) (dimensionless)"},
                   {"grid", Kind::integer, "256", "number of grid cells (count)"},
                   {"depth", Kind::integer, "24", "iteration depth (count)"},
                   {"method", Kind::text, "exact", "exact (functional equation) | rn (r_n iteration)"}},
                  [](const Params& p) {
                    const double a = p.real("a");
                    const long grid = p.integer("grid");
                    const int depth = p.small_int("depth");
                    const std::string& method = p.text("method");
                    detail::require_grid(grid);
                    if (depth < 0) throw domain_error("--depth must be >= 0");
                    if (method != "exact" && method != "rn") throw usage_error("--method must be exact or rn");
                    Table t{{"x", "value"}, {}, {}, false};
                    for (long i = 0; i <= grid; ++i) {
                      const ExactScalar x = ExactScalar::rational(i, grid);
                      const double v = method == "exact" ? derham_eval_recursive(x, a, depth)
                                                         : rn_iterate(x, -std::log2(a), depth);
                      t.rows.push_back({x.value(), v});
                    }
                    return t;
                  }});

  cmds.push_back({"derham-velocity",
                  "Closed-form forward velocity of R_a at the interior dyadics p/2^depth. CSV: x,digit_sum,value",
                  {{"a", Kind::real, "0.25", "weight a in (0,1), a != 1/2 (dimensionless)"},
                   {"depth", Kind::integer, "4", "dyadic depth (count, <= 24)"}},
                  [](const Params& p) {
                    const DeRhamParams params(p.real("a"));
                    const int depth = p.small_int("depth");
                    if (depth < 1 || depth > 24) throw domain_error("--depth must lie in [1, 24]");
                    Table t{{"x", "digit_sum", "value"}, {}, {}, false};
                    for (std::int64_t q = 1; q < (std::int64_t{1} << depth); ++q) {
                      const ExactScalar x = ExactScalar::dyadic(q, depth);
                      t.rows.push_back({x.value(), static_cast<double>(dyadic_expand(x, depth).digit_sum()),
                                        derham_velocity_exact(x, params, depth)});
                    }
                    return t;
                  }});

  cmds.push_back({"dn-profile",
                  "d_k recursion on the dyadics p/2^grid-depth in [0,1). CSV: x,value",
                  {{"a-exp", Kind::real, "0.5", "exponent a > 0 of the factor 2^a - 1 (dimensionless)"},
                   {"k", Kind::integer, "4", "recursion depth (count)"},
                   {"grid-depth", Kind::integer, "8", "grid of 2^grid-depth points (count, <= 20)"}},
                  [](const Params& p) {
                    const double a = p.real("a-exp");
                    const int k = p.small_int("k");
                    const int g = p.small_int("grid-depth");
                    if (g < 0 || g > 20) throw domain_error("--grid-depth must lie in [0, 20]");
                    Table t{{"x", "value"}, {}, {}, false};
                    for (std::int64_t q = 0; q < (std::int64_t{1} << g); ++q) {
                      const ExactScalar x = ExactScalar::dyadic(q, g);
                      t.rows.push_back({x.value(), dn_recursion(x, a, k)});
                    }
                    return t;
                  }});

  cmds.push_back({"rn-iterate",
                  "r_n iteration on the uniform grid x = i/grid. CSV: x,value",
                  {{"a-exp", Kind::real, "0.5", "exponent in (0,1], weight 2^-a-exp (dimensionless)"},
                   {"n", Kind::integer, "6", "iteration count"},
                   {"grid", Kind::integer, "256", "number of grid cells (count)"}},
                  [](const Params& p) {
                    const double a = p.real("a-exp");
                    const int n = p.small_int("n");
                    const long grid = p.integer("grid");
                    detail::require_grid(grid);
                    Table t{{"x", "value"}, {}, {}, false};
                    for (long i = 0; i <= grid; ++i) {
                      const ExactScalar x = ExactScalar::rational(i, grid);
                      t.rows.push_back({x.value(), rn_iterate(x, a, n)});
                    }
                    return t;
                  }});

  cmds.push_back({"mc-derham",
                  "Monte Carlo estimate of R_a(x) from biased binary records. CSV: x,a,estimate,std_error,reference",
                  {{"x", Kind::real, "0.5", "abscissa in [0,1]"},
                   {"a", Kind::real, "0.25", "weight a in (0,1) (dimensionless)"},
                   {"trials", Kind::integer, "100000", "number of records (count)"},
                   {"flips", Kind::integer, "53", "digits per record (count)"}},
                  [](const Params& p) {
                    const double x = p.real("x");
                    const double a = p.real("a");
                    const auto seed = static_cast<std::uint64_t>(p.integer("seed"));
                    const auto mc = mc_derham_estimate(x, a, p.integer("trials"), p.small_int("flips"), seed);
                    return Table{{"x", "a", "estimate", "std_error", "reference"},
                                 {{x, a, mc.estimate, mc.std_error, derham_eval_recursive(x, a, 60)}},
                                 {},
                                 false};
                  }});

  cmds.push_back({"scale-sequence",
                  "Scale-regularizing sequence eps_n = (prod factors)^(-1/alpha). CSV: n,eps",
                  {{"factors", Kind::text, "2,2,2,2", "comma-separated derivative factors, each > 1"},
                   {"alpha", Kind::real, "1", "order in (0,1] (dimensionless)"}},
                  [](const Params& p) {
                    const auto seq = scale_regularizing_sequence(detail::split_reals(p.text("factors"), "factors"),
                                                                 p.real("alpha"));
                    Table t{{"n", "eps"}, {}, {}, false};
                    for (size_t i = 0; i < seq.epsilons.size(); ++i)
                      t.rows.push_back({static_cast<double>(i + 1), seq.epsilons[i]});
                    return t;
                  }});

  cmds.push_back({"fracvar",
                  "Fractal variation at one scale. CSV: eps,value",
                  {signal_flag("pow:0.5"),
                   {"x", Kind::real, "0", "base point (abscissa)"},
                   {"n", Kind::integer, "0", "Taylor order (count)"},
                   {"beta", Kind::real, "0.5", "fractional order in (0,1] (dimensionless)"},
                   {"eps", Kind::real, "0.01", "scale (length)"},
                   detail::side_flag()},
                  [](const Params& p) {
                    const double eps = p.real("eps");
                    const double v = fracvar(parse_signal(p.text("f")), p.real("x"),
                                             FracOrder(p.small_int("n"), p.real("beta")), eps, p.side());
                    return Table{{"eps", "value"}, {{eps, v}}, {}, false};
                  }});

  cmds.push_back({"velocity",
                  "Fractional velocity (limit over eps_k = eps0 2^-k); orders beta > 1 with n = 0 use "
                  "the bare increment quotient. Exit 2 if the limit is not reached. CSV: x,value,converged,terms_used",
                  {signal_flag("pow:0.5"),
                   {"x", Kind::real, "0", "base point (abscissa)"},
                   {"n", Kind::integer, "0", "Taylor order (count)"},
                   {"beta", Kind::real, "0.5", "fractional order > 0 (dimensionless)"},
                   detail::side_flag(), detail::eps0_flag(), detail::tol_flag(), detail::terms_flag()},
                  [](const Params& p) {
                    const double x = p.real("x");
                    const auto v = detail::velocity_of(parse_signal(p.text("f")), x, p.small_int("n"), p.real("beta"),
                                                       p.side(), p.real("eps0"), p.real("tol"),
                                                       p.small_int("max-terms"));
                    Table t{{"x", "value", "converged", "terms_used"},
                            {{x, v.value(), v.converged() ? 1.0 : 0.0, static_cast<double>(v.result.terms_used)}},
                            {},
                            false};
                    detail::note_limit(t, "limit", v.result);
                    return t;
                  }});

  cmds.push_back({"scale-velocity",
                  "Scale velocity eps^beta d/deps f(x +- eps) / (1 - {beta}). CSV: eps,value",
                  {signal_flag("pow:0.5"),
                   {"x", Kind::real, "0", "base point (abscissa)"},
                   {"beta", Kind::real, "0.5", "order in (0,1] (dimensionless)"},
                   {"eps", Kind::real, "0.01", "scale (length)"},
                   detail::side_flag()},
                  [](const Params& p) {
                    const double eps = p.real("eps");
                    const double v = scale_velocity(parse_signal(p.text("f")), p.real("x"), p.real("beta"), eps, p.side());
                    return Table{{"eps", "value"}, {{eps, v}}, {}, false};
                  }});

  cmds.push_back({"equivalence",
                  "Fractal-variation limit of order 1-beta against the scale-velocity limit of order beta. "
                  "Exit 2 if either limit is not reached. CSV: fractional,scale,agree",
                  {signal_flag("poly:1,0,0"),
                   {"x", Kind::real, "1", "base point (abscissa)"},
                   {"beta", Kind::real, "0.5", "order in (0,1) (dimensionless)"},
                   detail::side_flag(), detail::eps0_flag(), detail::tol_flag(), detail::terms_flag()},
                  [](const Params& p) {
                    const auto r = limit_equivalence_check(parse_signal(p.text("f")), p.real("x"), p.real("beta"),
                                                           p.real("eps0"), p.real("tol"), p.side(),
                                                           p.small_int("max-terms"));
                    Table t{{"fractional", "scale", "agree"},
                            {{r.fractional.value, r.scale.value, r.agree ? 1.0 : 0.0}},
                            {},
                            false};
                    if (!r.warning.empty()) t.diagnostics.push_back(r.warning);
                    detail::note_limit(t, "fractional", r.fractional);
                    detail::note_limit(t, "scale", r.scale);
                    return t;
                  }});

  cmds.push_back({"set-of-change",
                  "Dyadic grid points p/2^depth in (0,1) where the velocity converges to a value above "
                  "the threshold. CSV: x,value",
                  {signal_flag("derham:0.25@30"),
                   {"beta", Kind::real, "2", "order > 0 (dimensionless)"},
                   {"depth", Kind::integer, "4", "grid depth (count, <= 16)"},
                   {"threshold", Kind::real, "1e-04", "minimum |velocity| reported (absolute)"},
                   detail::side_flag(),
                   {"eps0", Kind::real, "0.5", "first scale of eps_k = eps0 2^-k (length)"},
                   detail::tol_flag(), detail::terms_flag()},
                  [](const Params& p) {
                    const int depth = p.small_int("depth");
                    if (depth < 1 || depth > 16) throw domain_error("--depth must lie in [1, 16]");
                    std::vector<ExactScalar> grid;
                    for (std::int64_t q = 1; q < (std::int64_t{1} << depth); ++q) grid.push_back(ExactScalar::dyadic(q, depth));
                    const double beta = p.real("beta");
                    const Signal f = parse_signal(p.text("f"));
                    const auto found =
                        beta > 1.0 ? set_of_change_scan(f, grid, beta, p.side(), p.real("eps0"), p.real("tol"),
                                                        p.real("threshold"), p.small_int("max-terms"))
                                   : set_of_change_scan(f, grid, FracOrder(beta), p.side(), p.real("eps0"),
                                                        p.real("tol"), p.real("threshold"), p.small_int("max-terms"));
                    Table t{{"x", "value"}, {}, {}, false};
                    for (const auto& cp : found) t.rows.push_back({cp.x.value(), cp.estimate.value()});
                    return t;
                  }});

  cmds.push_back({"holder",
                  "Log-log least-squares Holder exponent. CSV: alpha_hat,r_squared,samples_used",
                  {signal_flag("abs-pow:0.5@0"),
                   {"x", Kind::real, "0", "base point (abscissa)"},
                   {"eps-min", Kind::real, "1e-06", "smallest scale (length)"},
                   {"eps-max", Kind::real, "0.1", "largest scale (length)"},
                   {"points", Kind::integer, "20", "number of scales (count)"},
                   detail::side_flag()},
                  [](const Params& p) {
                    const auto fit = holder_exponent(parse_signal(p.text("f")), p.real("x"), p.real("eps-min"),
                                                     p.real("eps-max"), p.small_int("points"), p.side());
                    return Table{{"alpha_hat", "r_squared", "samples_used"},
                                 {{fit.alpha_hat, fit.r_squared, static_cast<double>(fit.samples_used)}},
                                 {},
                                 false};
                  }});

  cmds.push_back({"rl-integral", "Riemann-Liouville integral I^beta f(x) from a0. CSV: x,value",
                  detail::quadrature_flags(), [](const Params& p) {
                    const auto spec = detail::quadrature(p);
                    return Table{{"x", "value"}, {{spec.x, rl_integral(parse_signal(p.text("f")), p.real("beta"), spec)}}, {}, false};
                  }});

  cmds.push_back({"caputo", "Caputo derivative of order beta in (0,1) from a0. CSV: x,value",
                  detail::quadrature_flags(), [](const Params& p) {
                    const auto spec = detail::quadrature(p);
                    return Table{{"x", "value"}, {{spec.x, caputo_derivative(parse_signal(p.text("f")), p.real("beta"), spec)}}, {}, false};
                  }});

  cmds.push_back({"rl-derivative", "Riemann-Liouville derivative of order beta in (0,1) from a0. CSV: x,value",
                  detail::quadrature_flags(), [](const Params& p) {
                    const auto spec = detail::quadrature(p);
                    return Table{{"x", "value"}, {{spec.x, rl_derivative(parse_signal(p.text("f")), p.real("beta"), spec)}}, {}, false};
                  }});

  cmds.push_back({"inversion", "Residuals of C^b I^b f = f and I^b C^b f = f - f(a0) at x. CSV: left,right",
                  detail::quadrature_flags(), [](const Params& p) {
                    const auto r = inversion_check(parse_signal(p.text("f")), p.real("beta"), detail::quadrature(p));
                    return Table{{"left", "right"}, {{r.left, r.right}}, {}, false};
                  }});

  cmds.push_back({"theorem-check",
                  "Scale velocity of eps -> I^beta f(x+eps) against its Caputo closed form. CSV: lhs,rhs,residual",
                  {signal_flag("poly:1,0"),
                   {"a0", Kind::real, "0", "lower terminal a (abscissa)"},
                   {"x", Kind::real, "0.5", "base point (abscissa)"},
                   {"alpha", Kind::real, "0.3", "scale-velocity order in (0,1) (dimensionless)"},
                   {"beta", Kind::real, "0.6", "integral order in (0,1) (dimensionless)"},
                   {"eps", Kind::real, "0.05", "scale (length)"},
                   {"nodes", Kind::integer, "2048", "mesh points including both ends (count)"},
                   {"subtract-boundary", Kind::integer, "0", "1 to integrate f - f(a0) instead of f"}},
                  [](const Params& p) {
                    const auto r = bridge_theorem_check(parse_signal(p.text("f")), p.real("a0"), p.real("x"),
                                                        p.real("alpha"), p.real("beta"), p.real("eps"),
                                                        p.small_int("nodes"), p.integer("subtract-boundary") != 0);
                    return Table{{"lhs", "rhs", "residual"}, {{r.lhs, r.rhs, r.residual}}, {}, false};
                  }});

  cmds.push_back({"limit-prop",
                  "lim (1/alpha) eps^(1-alpha) C^beta f(x+eps) against the velocity of I^(1-beta)[f - f(a0)]. "
                  "Exit 2 if either limit is not reached. CSV: caputo_side,velocity_side,agree",
                  {signal_flag("poly:1,0"),
                   {"a0", Kind::real, "0", "lower terminal a (abscissa)"},
                   {"x", Kind::real, "0", "base point, >= a0 (abscissa)"},
                   {"alpha", Kind::real, "0.5", "velocity order in (0,1) (dimensionless)"},
                   {"beta", Kind::real, "0.5", "Caputo order in (0,1) (dimensionless)"},
                   {"nodes", Kind::integer, "512", "mesh points including both ends (count)"},
                   detail::tol_flag(), detail::eps0_flag(), detail::terms_flag()},
                  [](const Params& p) {
                    const auto r = limit_proposition_check(parse_signal(p.text("f")), p.real("a0"), p.real("x"),
                                                           p.real("alpha"), p.real("beta"), p.small_int("nodes"),
                                                           p.real("tol"), p.real("eps0"), p.small_int("max-terms"));
                    Table t{{"caputo_side", "velocity_side", "agree"},
                            {{r.caputo_side.value, r.velocity_side.value(), r.agree ? 1.0 : 0.0}},
                            {},
                            false};
                    detail::note_limit(t, "caputo side", r.caputo_side);
                    detail::note_limit(t, "velocity side", r.velocity_side.result);
                    return t;
                  }});
  return cmds;
}

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_csv(std::ostream& out, const Table& t) {
  for (size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_real(row[i]);
    out << '\n';
  }
}

inline void write_json(std::ostream& out, const RunConfig& cfg, const Subcommand& cmd, const Table& t) {
  nlohmann::ordered_json j;
  j["subcommand"] = cfg.subcommand;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  for (const Flag& f : cmd.flags) {
    const std::string& v = cfg.parameters.text(f.name);
    if (f.kind == Kind::real) params[f.name] = cfg.parameters.real(f.name);
    else if (f.kind == Kind::integer) params[f.name] = cfg.parameters.integer(f.name);
    else params[f.name] = v;
  }
  params["seed"] = cfg.seed;
  j["parameters"] = params;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json r;
    for (size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = row[i];
    rows.push_back(r);
  }
  j["results"] = rows;
  j["diagnostics"] = t.diagnostics;
  out << j.dump(2) << '\n';
}

/// Runs one parsed configuration. Errors go to `err` with the exit codes
/// 1 (domain or contract), 2 (required limit not reached), 64 (usage).
inline int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto cmds = subcommands();
  const Subcommand* cmd = nullptr;
  for (const auto& c : cmds)
    if (c.name == cfg.subcommand) cmd = &c;
  if (!cmd) {
    err << "unknown subcommand '" << cfg.subcommand << "'\n";
    return usage;
  }
  try {
    // Numeric flags are parsed up front so a typo never reaches the analysis.
    for (const Flag& f : cmd->flags) {
      if (f.kind == Kind::real) cfg.parameters.real(f.name);
      if (f.kind == Kind::integer) cfg.parameters.integer(f.name);
    }
    const Table t = cmd->run(cfg.parameters);
    std::ofstream file;
    if (cfg.output_path) {
      file.open(*cfg.output_path, std::ios::binary);
      if (!file) {
        err << "cannot open " << *cfg.output_path << '\n';
        return domain_failure;
      }
    }
    std::ostream& sink = cfg.output_path ? static_cast<std::ostream&>(file) : out;
    if (cfg.format == Format::csv) write_csv(sink, t);
    else write_json(sink, cfg, *cmd, t);
    for (const auto& d : t.diagnostics) err << cfg.subcommand << ": " << d << '\n';
    return t.not_converged ? no_convergence : ok;
  } catch (const usage_error& e) {
    err << cfg.subcommand << ": " << e.what() << '\n';
    return usage;
  } catch (const std::exception& e) {
    err << cfg.subcommand << ": " << e.what() << '\n';
    return domain_failure;
  }
}

/// Parses argv into a RunConfig and dispatches it.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"fracvel: fractional velocities, De Rham functions and fractional integrals"};
  app.require_subcommand(1);
  app.fallthrough();

  const auto cmds = subcommands();
  std::map<std::string, std::string> storage_format;
  std::map<std::string, Params> storage;
  std::map<std::string, std::string> outputs;
  std::map<std::string, long> seeds;
  std::map<std::string, CLI::App*> apps;

  for (const auto& c : cmds) {
    CLI::App* sub = app.add_subcommand(c.name, c.description);
    apps[c.name] = sub;
    Params& p = storage[c.name];
    for (const Flag& f : c.flags) {
      p.values[f.name] = f.default_value;
      sub->add_option("--" + f.name, p.values[f.name], f.help)
          ->default_str(f.default_value)
          ->type_name(f.kind == Kind::real ? "FLOAT" : f.kind == Kind::integer ? "INT" : "TEXT");
    }
    storage_format[c.name] = "csv";
    sub->add_option("--format", storage_format[c.name], "output format: csv | json")
        ->default_str("csv")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--output", outputs[c.name], "write results to this file instead of stdout");
    seeds[c.name] = 0;
    sub->add_option("--seed", seeds[c.name], "random seed (integer)")->default_str("0");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return usage;
  }

  for (const auto& c : cmds) {
    if (!apps[c.name]->parsed()) continue;
    RunConfig cfg;
    cfg.subcommand = c.name;
    cfg.parameters = storage[c.name];
    cfg.parameters.values["seed"] = std::to_string(seeds[c.name]);
    cfg.format = storage_format[c.name] == "json" ? Format::json : Format::csv;
    cfg.seed = static_cast<std::uint64_t>(seeds[c.name]);
    if (!outputs[c.name].empty()) cfg.output_path = outputs[c.name];
    return dispatch(cfg, out, err);
  }
  err << app.help();
  return usage;
}

}  // namespace fracvel::cli
