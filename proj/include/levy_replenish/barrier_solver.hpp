#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "levy_replenish/valuation.hpp"

namespace levy_replenish {

struct SolveResult {
  double b_star = 0.0;
  double residual = 0.0;  ///< |M(b*)|
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  int iterations = 0;
  bool closed_form_available = false;
  double closed_form = 0.0;
};

nlohmann::json to_json(const SolveResult& s);

/// Root of M^(q,r). Brackets by doubling [-1, 1] (capped at |b| <= 1e6) and refines with a
/// safeguarded bracketing method. Throws NumericalError when no sign change is found.
SolveResult solve_bstar(const Valuator& valuator);

/// 1/Phi(q+r) - 1/Phi(q) - kappa'(0+)/(q+r) - q C / 2; quadratic cost only
/// (std::invalid_argument otherwise).
double bstar_quadratic_closed_form(const ValidatedSpec& spec);

/// Continuous-monitoring counterpart of M:
/// Phi(q) int_b^inf f(y) e^{-Phi(q)(y-b)} dy + C q / Phi(q) - f(b).
double classical_m(const ValidatedSpec& spec, double b);
double classical_bstar(const ValidatedSpec& spec);

enum class SweepParam { kC, kR, kB };

SweepParam parse_sweep_param(const std::string& name);
std::string sweep_param_name(SweepParam p);

struct SweepRow {
  double param_value = 0.0;
  bool ok = false;
  std::string error;
  double b = 0.0;          ///< b* (C, r sweeps) or the fixed barrier (b sweep)
  double residual = 0.0;   ///< |M(b)|
  std::vector<double> values;  ///< v_b on the x grid
};

struct SweepResult {
  SweepParam param = SweepParam::kC;
  std::vector<double> x_grid;
  std::vector<SweepRow> rows;
  /// C and r sweeps: b* strictly decreasing in the parameter.
  std::optional<bool> b_decreasing;
  /// C sweep: v_{b*}(x) nondecreasing in C; r sweep: nonincreasing in r.
  std::optional<bool> value_monotone;
  /// b sweep: v_{b*}(x) <= v_b(x) + 1e-7 for every row and x.
  std::optional<bool> minimum_at_bstar;
  double b_star = 0.0;  ///< b sweep only
};

/// Rows are independent and evaluated concurrently; row failures are recorded and the sweep
/// continues.
SweepResult sweep(const ValidatedSpec& spec, SweepParam param, const std::vector<double>& values,
                  const std::vector<double>& x_grid, const QuadratureConfig& cfg = {});

std::string sweep_csv(const SweepResult& s);

}  // namespace levy_replenish
