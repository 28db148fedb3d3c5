#include "levy_replenish/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "levy_replenish/barrier_solver.hpp"
#include "levy_replenish/errors.hpp"
#include "levy_replenish/policy_simulator.hpp"

namespace levy_replenish {

namespace {

CheckReport part(std::string name, std::vector<double> grid, double residual, double tol, std::string notes = {}) {
  CheckReport r;
  r.name = std::move(name);
  r.grid = std::move(grid);
  r.max_residual = residual;
  r.tolerance = tol;
  r.pass = residual <= tol;
  r.notes = std::move(notes);
  return r;
}

CheckReport combine(std::string name, std::vector<double> grid, std::vector<CheckReport> parts,
                    std::string notes = {}) {
  CheckReport r;
  r.name = std::move(name);
  r.grid = std::move(grid);
  r.tolerance = 1.0;
  for (const auto& p : parts) {
    const double scaled = p.tolerance > 0.0 ? p.max_residual / p.tolerance
                                            : (p.max_residual > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.max_residual = std::max(r.max_residual, std::isnan(scaled) ? std::numeric_limits<double>::infinity() : scaled);
  }
  r.pass = r.max_residual <= r.tolerance;
  r.notes = notes.empty() ? "residual is the largest part residual divided by its tolerance" : std::move(notes);
  r.parts = std::move(parts);
  return r;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

}  // namespace

nlohmann::json to_json(const CheckReport& r) {
  nlohmann::json j = {{"name", r.name},
                      {"residual", r.max_residual},
                      {"tolerance", r.tolerance},
                      {"pass", r.pass},
                      {"grid", r.grid},
                      {"notes", r.notes}};
  if (!r.parts.empty()) {
    j["parts"] = nlohmann::json::array();
    for (const auto& p : r.parts) j["parts"].push_back(to_json(p));
  }
  return j;
}

CheckReport check_slope_and_convexity(const Valuator& val, double b, const VerifyOptions& opt) {
  const BarrierTerms t = val.barrier_terms(b);
  const double C = val.spec().C();
  const double slope = std::abs(val.value_derivative(t, b) + C);
  CheckReport s = part("slope", {b}, slope, opt.tolerance.value_or(1e-7), "|v'(b) + C|");

  const std::vector<double> grid = linspace(b - 5.0, b + 5.0, 200);
  std::vector<double> d(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) d[i] = val.value_derivative(t, grid[i]);
  double worst = 0.0;
  double where = grid.front();
  for (std::size_t i = 1; i < d.size(); ++i) {
    if (d[i - 1] - d[i] > worst) {
      worst = d[i - 1] - d[i];
      where = grid[i];
    }
  }
  CheckReport c = part("convexity", grid, worst, 1e-9,
                       worst > 0.0 ? fmt("largest decrease of v' at x = %.6g", where) : "v' nondecreasing");
  return combine("slope_convexity", {b}, {s, c});
}

GeneratorValue apply_generator(const Valuator& val, const BarrierTerms& terms, double x) {
  const LevyModel& m = val.spec().model();
  const double q = val.spec().q();
  const double b = terms.b;
  const double h = 1e-3 * (1.0 + std::abs(x));
  if (std::abs(x - b) < 2.0 * h)
    throw DomainError(fmt("finite-difference stencil at x = %.6g reaches the barrier b = %.6g", x, b));
  auto v = [&](double y) { return val.value(terms, y); };
  const double vm2 = v(x - 2.0 * h);
  const double vm1 = v(x - h);
  const double v0 = v(x);
  const double vp1 = v(x + h);
  const double vp2 = v(x + 2.0 * h);

  GeneratorValue g;
  g.x = x;
  g.v = v0;
  g.d1 = (vm2 - 8.0 * vm1 + 8.0 * vp1 - vp2) / (12.0 * h);
  g.d2 = (-vm2 + 16.0 * vm1 - 30.0 * v0 + 16.0 * vp1 - vp2) / (12.0 * h * h);
  if (m.lambda > 0.0) {
    QuadratureConfig cfg = val.config();
    cfg.rtol = std::max(cfg.rtol, 1e-9);
    std::vector<double> breaks;
    if (b < x) breaks.push_back(b);
    const QuadResult jr = integrate_lower_tail(
        [&](double y) { return (v(y) - v0) * m.jumps.density(x - y); }, x, m.jumps.decay_rate(), breaks, cfg);
    g.jump = m.lambda * jr.value;
  }
  const double diffusion = 0.5 * m.sigma * m.sigma * g.d2;
  const double drift = m.mu * g.d1;
  g.generator = diffusion + drift + g.jump - q * v0;
  const double f = val.spec().cost().f(x);
  g.scale = std::max({std::abs(diffusion), std::abs(drift), std::abs(g.jump), std::abs(q * v0), std::abs(f)});
  return g;
}

std::vector<double> default_generator_grid(double b) {
  std::vector<double> out;
  for (double d : {-5.0, -3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0, 5.0}) out.push_back(b + d);
  return out;
}

CheckReport check_generator(const Valuator& val, double b, const std::vector<double>& grid, const VerifyOptions& opt) {
  const BarrierTerms t = val.barrier_terms(b);
  const double q = val.spec().q();
  const double r = val.spec().r();
  const double p = q + r;
  const double C = val.spec().C();
  const double pp = val.kernels().phi_p();
  const PiecewisePolynomial& f = val.spec().cost().f;
  const double vb = val.value(t, b);
  const double tol = opt.tolerance.value_or(1e-4);

  std::vector<double> upper_grid;
  std::vector<double> lower_grid;
  double upper = 0.0;
  double lower = 0.0;
  double hjb = 0.0;
  for (double x : grid) {
    const GeneratorValue g = apply_generator(val, t, x);
    const double fx = f(x);
    if (x > b) {
      upper_grid.push_back(x);
      const double res = std::abs(g.generator + fx) / g.scale;
      upper = std::max(upper, res);
      hjb = std::max(hjb, res);
    } else {
      lower_grid.push_back(x);
      const double theta = val.theta_integral(b, x, f).value;
      const double rhs = -q * r / p * (t.F * (1.0 - std::exp(pp * (x - b))) + C * (b - x)) + r * theta;
      const double jump_to_b = r * (C * (b - x) + vb - g.v);
      const double s1 = std::max({g.scale, std::abs(rhs)});
      const double s2 = std::max({g.scale, std::abs(jump_to_b)});
      lower = std::max(lower, std::abs(g.generator + fx - rhs) / s1);
      hjb = std::max(hjb, std::abs(g.generator + jump_to_b + fx) / s2);
    }
  }
  const std::string rel = "relative to the largest term of the equation";
  return combine("generator", grid,
                 {part("generator_above", upper_grid, upper, tol, "|(L-q)v + f|, " + rel),
                  part("generator_below", lower_grid, lower, tol, "|(L-q)v + f - rhs|, " + rel),
                  part("hjb", grid, hjb, tol, "|(L-q)v + r(Mv - v) + f|, " + rel)});
}

CheckReport check_m_derivative(const Valuator& val, const std::vector<double>& b_grid, const VerifyOptions& opt) {
  const KernelPair& k = val.kernels();
  const double q = val.spec().q();
  const double C = val.spec().C();
  const double pq = k.phi_q();
  const double pp = k.phi_p();
  const double p = k.p();
  const PiecewisePolynomial fp = val.spec().cost().f.derivative();
  const std::vector<double>& kinks = val.spec().cost().f.breakpoints();

  double worst = 0.0;
  std::vector<double> used;
  std::string skipped;
  auto g = [&](double b) { return std::exp(-pq * b) * val.m_func(b); };
  for (double b : b_grid) {
    const double h = 1e-2 * (1.0 + std::abs(b));
    const bool near_kink =
        std::any_of(kinks.begin(), kinks.end(), [&](double kx) { return std::abs(kx - b) <= 2.0 * h; });
    if (near_kink) {
      skipped += (skipped.empty() ? "" : ", ") + fmt("%.6g", b);
      continue;
    }
    used.push_back(b);
    const double lhs = (g(b - 2.0 * h) - 8.0 * g(b - h) + 8.0 * g(b + h) - g(b + 2.0 * h)) / (12.0 * h);
    const QuadResult tail = integrate_lower_tail([&](double z) { return fp(z) * k.infimum_density(b - z); }, b,
                                                 k.decay_rate(), kinks, val.config());
    const double expect_fp = k.infimum_atom() * fp(b) + tail.value;
    const double rhs = -std::exp(-pq * b) * pp / p * (C * q + expect_fp);
    worst = std::max(worst, std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
  }
  return part("m_derivative", used, worst, opt.tolerance.value_or(1e-6),
              skipped.empty() ? "relative difference" : "skipped kinks at b = " + skipped);
}

CheckReport check_resolvent_identities(const Valuator& val, const VerifyOptions& opt) {
  const KernelPair& k = val.kernels();
  const LevyModel& m = val.spec().model();
  const double q = val.spec().q();
  const double p = k.p();
  const double pq = k.phi_q();
  const double pp = k.phi_p();
  const QuadratureConfig& cfg = val.config();

  SimConfig sc;
  sc.paths = opt.paths;
  sc.seed = opt.seed;
  sc.threads = opt.threads;
  sc.dt = opt.dt;

  // (a) tau_0^- killed q-resolvent started at x = 1, A = [0.5, 2].
  const double xa = 1.0;
  const double lo_a = 0.5;
  const double hi_a = 2.0;
  const double wx = w(k.q_basis(), xa);
  const double exact_a =
      integrate([&](double y) { return std::exp(-pq * y) * wx - w(k.q_basis(), xa - y); }, lo_a, hi_a, {xa}, cfg)
          .value;
  SimConfig sa = sc;
  sa.seed = path_seed(opt.seed, 0xa);
  const SimEstimate mc_a = estimate_killed_occupation(m, q, xa, lo_a, hi_a, KillRule::kBelowZero, sa);
  const double res_a = std::abs(exact_a - mc_a.mean) / mc_a.se;

  // (b) total mass of the (q+r)-resolvent density over a wide interval.
  const double x = 0.0;
  const double kp = kappa_prime(m, pp);
  // Below x the two terms cancel to the transient part of W^(q+r).
  auto dens = [&](double y) { return y >= x ? std::exp(pp * (x - y)) / kp : -w_transient(k.p_basis(), x - y); };
  double p_decay = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < k.p_basis().size(); ++i) p_decay = std::min(p_decay, -k.p_basis().roots[i].real());
  const double width = 60.0 / std::min(pp, p_decay);
  const double mass = integrate(dens, x - width, x + width, {x}, cfg).value;
  const double res_b = std::abs(mass * p - 1.0);

  // (c) Theta against the tau_0^+ killed (q+r)-resolvent, x0 = -1, A = [-2, -0.5].
  const double x0 = -1.0;
  const double lo_c = -2.0;
  const double hi_c = -0.5;
  const double exact_c = val.theta_integral(0.0, x0, PiecewisePolynomial::indicator(lo_c, hi_c)).value;
  SimConfig scc = sc;
  scc.seed = path_seed(opt.seed, 0xc);
  const SimEstimate mc_c = estimate_killed_resolvent(val.spec(), x0, lo_c, hi_c, scc);
  const double res_c = std::abs(exact_c - mc_c.mean) / mc_c.se;

  return combine(
      "resolvent", {},
      {part("killed_below", {xa, lo_a, hi_a}, res_a, opt.tolerance.value_or(3.0),
            fmt("standard errors; exact %.10g", exact_a) + fmt(", MC %.10g", mc_a.mean)),
       part("total_mass", {x - width, x + width}, res_b, 1e-4, fmt("(q+r) * mass = %.12g", mass * p)),
       part("killed_above", {x0, lo_c, hi_c}, res_c, 3.0,
            fmt("standard errors; exact %.10g", exact_c) + fmt(", MC %.10g", mc_c.mean))});
}

CheckReport check_density_positivity(const Valuator& val, double b, const VerifyOptions& opt) {
  double worst = 0.0;
  const std::vector<double> xs = linspace(b - 4.0, b + 4.0, 9);
  const std::vector<double> ys = linspace(b - 8.0, b + 8.0, 33);
  for (double x : xs)
    for (double y : ys) worst = std::max(worst, -val.resolvent_density(b, x, y));
  return part("density_positivity", xs, worst, opt.tolerance.value_or(1e-10), "largest negative part of r_b(x, y)");
}

const std::vector<std::string>& available_checks() {
  static const std::vector<std::string> names = {"slope_convexity", "generator", "m_derivative", "resolvent",
                                                 "density_positivity"};
  return names;
}

std::vector<CheckReport> run_checks(const Valuator& val, const std::vector<std::string>& names,
                                    std::optional<double> b, const VerifyOptions& opt) {
  for (const auto& n : names) {
    if (std::find(available_checks().begin(), available_checks().end(), n) == available_checks().end()) {
      std::string list;
      for (const auto& a : available_checks()) list += (list.empty() ? "" : ", ") + a;
      throw std::invalid_argument("unknown check \"" + n + "\" (available: " + list + ")");
    }
  }
  const double bs = b ? *b : solve_bstar(val).b_star;
  std::vector<CheckReport> out;
  for (const auto& n : names) {
    if (n == "slope_convexity") out.push_back(check_slope_and_convexity(val, bs, opt));
    if (n == "generator") out.push_back(check_generator(val, bs, default_generator_grid(bs), opt));
    if (n == "m_derivative") {
      std::vector<double> grid;
      for (double d : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) grid.push_back(bs + d);
      out.push_back(check_m_derivative(val, grid, opt));
    }
    if (n == "resolvent") out.push_back(check_resolvent_identities(val, opt));
    if (n == "density_positivity") out.push_back(check_density_positivity(val, bs, opt));
  }
  return out;
}

}  // namespace levy_replenish
