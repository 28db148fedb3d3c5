// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "levy_replenish/barrier_solver.hpp"
#include "levy_replenish/policy_simulator.hpp"
#include "levy_replenish/quadrature.hpp"
#include "levy_replenish/scale_kernel.hpp"
#include "levy_replenish/spec_io.hpp"
#include "levy_replenish/valuation.hpp"
#include "levy_replenish/verifier.hpp"
#include "test_support.hpp"

using namespace levy_replenish;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const ValidatedSpec& spec_a() {
  static const ValidatedSpec s = validate(load_problem_spec(levy_test::spec_path("model_a.json")));
  return s;
}

const ValidatedSpec& spec_bm() {
  static const ValidatedSpec s = validate(load_problem_spec(levy_test::spec_path("brownian.json")));
  return s;
}

const Valuator& val_a() {
  static const Valuator v(spec_a());
  return v;
}

double bstar_a() {
  static const double b = solve_bstar(val_a()).b_star;
  return b;
}

Outcome laplace_identity() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (const ValidatedSpec* s : {&spec_a(), &spec_bm()}) {
    const ScaleBasis basis = build_basis(s->model(), s->q());
    for (int i = 1; i <= 10; ++i) {
      const double theta = basis.phi() + 0.5 * i;
      const double lhs = integrate_lower_tail([&](double y) { return std::exp(theta * y) * w(basis, -y); }, 0.0,
                                              theta - basis.phi(), {}, QuadratureConfig{})
                             .value;
      const double rhs = 1.0 / (laplace_exponent(s->model(), theta) - s->q());
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-6 && secs < 1.0, fmt("max relative error %.3g over 20 (model, theta) pairs, %.3f s", worst, secs)};
}

Outcome boundary_values() {
  const double wa = w(build_basis(spec_a().model(), spec_a().q()), 0.0);
  const double wb = w(build_basis(spec_bm().model(), spec_bm().q()), 0.0);
  const double err = std::max(std::abs(wa - 1.0), std::abs(wb));
  return {err <= 1e-10, fmt("W(0) = %.17g (model A), %.3g (Brownian)", wa, wb)};
}

Outcome closed_form_barrier() {
  const auto t0 = std::chrono::steady_clock::now();
  const double b = solve_bstar(Valuator(spec_a())).b_star;
  const double secs = seconds_since(t0);
  const double cf = bstar_quadratic_closed_form(spec_a());
  const double diff = std::abs(b - cf);
  return {diff <= 1e-8 && secs < 1.0, fmt("b* = %.15g, closed form %.15g, difference %.3g, %.3f s", b, cf, diff, secs)};
}

Outcome slope_condition() {
  const double b = bstar_a();
  const double d = val_a().value_derivative(b, b) + spec_a().C();
  return {std::abs(d) <= 1e-7, fmt("|v'(b*) + C| = %.3g", std::abs(d))};
}

Outcome convexity() {
  const double b = bstar_a();
  const BarrierTerms t = val_a().barrier_terms(b);
  double prev = -INFINITY;
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double x = b - 5.0 + 10.0 * i / 199.0;
    const double d = val_a().value_derivative(t, x);
    worst = std::max(worst, prev - d);
    prev = d;
  }
  return {worst <= 1e-9, fmt("largest decrease of v' on 200 points: %.3g", worst)};
}

Outcome branch_continuity() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-10.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double b = u(rng);
    const BarrierTerms t = val_a().barrier_terms(b);
    const double up = val_a().value(t, b, Valuator::Branch::kUpper);
    const double lo = val_a().value(t, b, Valuator::Branch::kLower);
    worst = std::max(worst, std::abs(up - lo) / std::abs(up));
  }
  return {worst <= 1e-9, fmt("max relative gap %.3g over 20 barriers", worst)};
}

Outcome dual_forms() {
  std::mt19937_64 rng(20240602);
  std::uniform_real_distribution<double> u(-10.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const BarrierTerms t = val_a().barrier_terms(u(rng));
    worst = std::max(worst, std::abs(t.F - t.F_alt) / std::abs(t.F));
  }
  return {worst <= 1e-7, fmt("max relative gap %.3g over 20 barriers", worst)};
}

Outcome monte_carlo() {
  const double b = bstar_a();
  bool pass = true;
  std::string detail;
  for (double dx : {-1.0, 0.0, 1.0}) {
    SimConfig cfg;
    cfg.paths = 1000000;
    cfg.dt = 1e-3;
    cfg.seed = 20240603 + static_cast<std::uint64_t>(dx + 1.0);
    const ValueEstimate e = estimate_value(spec_a(), b, b + dx, cfg);
    const double exact = val_a().value(b, b + dx);
    const double z = std::abs(exact - e.total.mean) / e.total.se;
    pass = pass && z <= 3.0;
    detail += fmt("%sx=b*%+g: formula %.6f, MC %.6f +- %.4f (%.2f SE, T=%.1f, %.0f s)", detail.empty() ? "" : "; ", dx,
                  exact, e.total.mean, e.total.se, z, e.total.horizon, e.total.wall_clock);
  }
  return {pass, detail};
}

Outcome minimality() {
  const double bs = bstar_a();
  double worst = -INFINITY;
  const BarrierTerms ts = val_a().barrier_terms(bs);
  for (double d : {-2.0, -1.0, -0.5, 0.5, 1.0, 2.0}) {
    const BarrierTerms t = val_a().barrier_terms(bs + d);
    for (int i = 0; i < 11; ++i) {
      const double x = bs - 5.0 + i;
      worst = std::max(worst, val_a().value(ts, x) - val_a().value(t, x));
    }
  }
  return {worst <= 1e-7, fmt("max of v_b*(x) - v_b(x) over 66 points: %.3g", worst)};
}

Outcome hjb_residuals() {
  const double b = bstar_a();
  const CheckReport r = check_generator(val_a(), b, default_generator_grid(b));
  bool pass = !r.parts.empty();
  std::string detail;
  for (const auto& p : r.parts) {
    pass = pass && p.max_residual <= 1e-4;
    detail += fmt("%s%s %.3g", detail.empty() ? "" : ", ", p.name.c_str(), p.max_residual);
  }
  return {pass, "relative residuals: " + detail};
}

Outcome derivative_identity() {
  const double b = bstar_a();
  const CheckReport r = check_m_derivative(val_a(), {b - 2, b - 1, b - 0.5, b + 0.5, b + 1, b + 2});
  return {r.max_residual <= 1e-6, fmt("max relative residual %.3g on 6 barriers", r.max_residual)};
}

Outcome classical_limit() {
  const double cb = classical_bstar(spec_a());
  const double b1000 = solve_bstar(Valuator(spec_a().with_r(1000.0))).b_star;
  const SweepResult s = sweep(spec_a(), SweepParam::kR, {0.5, 5, 50, 500}, {});
  std::string path;
  for (const auto& row : s.rows) path += fmt("%s%.5f", path.empty() ? "" : " > ", row.b);
  const bool decreasing = s.b_decreasing.value_or(false);
  return {std::abs(b1000 - cb) < 0.01 && decreasing,
          fmt("b*(r=1000) = %.6f, classical %.6f; b* over r = 0.5, 5, 50, 500: ", b1000, cb) + path};
}

Outcome killed_resolvent() {
  const double x0 = -1.0;
  const double lo = -2.0;
  const double hi = -0.5;
  const double exact = val_a().theta_integral(0.0, x0, PiecewisePolynomial::indicator(lo, hi)).value;
  SimConfig cfg;
  cfg.paths = 100000;
  cfg.seed = 20240613;
  const SimEstimate e = estimate_killed_resolvent(spec_a(), x0, lo, hi, cfg);
  const double z = std::abs(exact - e.mean) / e.se;
  return {z <= 3.0, fmt("Theta integral %.8f, MC %.8f +- %.2g (%.2f SE)", exact, e.mean, e.se, z)};
}

Outcome drift_only() {
  LevyModel m;
  m.mu = 1.0;
  m.allow_degenerate = true;
  const ValidatedSpec s = validate(levy_test::quadratic_problem(m, 0.05, 0.5, 1.0));
  SimConfig cfg;
  cfg.paths = 8;
  cfg.seed = 20240614;
  cfg.dt = 1e-3;
  const ValueEstimate e = estimate_value(s, -100.0, 1.0, cfg);
  const double expected = 1 / 0.05 + 2 / (0.05 * 0.05) + 2 / (0.05 * 0.05 * 0.05);
  const double bound = e.total.truncation_bound + e.total.dt_bound;
  const double err = std::abs(e.total.mean - expected);
  return {err <= bound + 1e-9 * expected,
          fmt("estimate %.10f vs %.0f, error %.3g, dt + truncation bound %.3g plus 1e-9 relative rounding (T=%.1f)", e.total.mean, expected, err, bound, e.total.horizon)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"scale-function Laplace identity", laplace_identity},
      {"W(0) boundary values", boundary_values},
      {"quadratic-cost barrier vs closed form", closed_form_barrier},
      {"slope condition at b*", slope_condition},
      {"convexity of v_b*", convexity},
      {"branch continuity at x = b", branch_continuity},
      {"F(b) dual forms", dual_forms},
      {"Monte Carlo value oracle", monte_carlo},
      {"minimality of b*", minimality},
      {"HJB residuals", hjb_residuals},
      {"derivative identity for M", derivative_identity},
      {"continuous-monitoring limit and r monotonicity", classical_limit},
      {"killed resolvent vs Monte Carlo", killed_resolvent},
      {"drift-only simulator smoke test", drift_only},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
