#pragma once

// Numerical certificates for the barrier policy: slope and convexity at the optimum, the
// generator equations, the derivative identity for M, and resolvent identities.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "levy_replenish/valuation.hpp"

namespace levy_replenish {

/// pass == (max_residual <= tolerance). A check built from parts reports the largest part
/// residual divided by that part's tolerance, against tolerance 1.
struct CheckReport {
  std::string name;
  std::vector<double> grid;
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string notes;
  std::vector<CheckReport> parts;
};

nlohmann::json to_json(const CheckReport& r);

struct VerifyOptions {
  std::uint64_t seed = 0;
  std::size_t paths = 100000;
  /// Replaces the tolerance of the leading part of each check.
  std::optional<double> tolerance;
  unsigned threads = 0;
  /// Grid step of the killed Gaussian simulations.
  double dt = 1e-3;
};

/// |v'(b)+C| <= 1e-7 and v' nondecreasing (slack 1e-9) on 200 points of [b-5, b+5].
CheckReport check_slope_and_convexity(const Valuator& val, double b, const VerifyOptions& opt = {});

/// (L-q)v at x by 4th-order central differences (h = 1e-3 (1+|x|)) and jump-integral
/// quadrature. Throws DomainError when the stencil reaches the barrier.
struct GeneratorValue {
  double x = 0.0;
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double jump = 0.0;       ///< lambda int (v(x-z) - v(x)) density(z) dz
  double generator = 0.0;  ///< (L-q)v(x)
  double scale = 0.0;      ///< largest magnitude among the terms of (L-q)v + f
};

GeneratorValue apply_generator(const Valuator& val, const BarrierTerms& terms, double x);

/// Default grid: b* +- {0.5, 1, 2, 3, 5}.
std::vector<double> default_generator_grid(double b);

CheckReport check_generator(const Valuator& val, double b, const std::vector<double>& grid,
                            const VerifyOptions& opt = {});

/// (e^{-Phi(q) b} M(b))' = -e^{-Phi(q) b} (Phi(q+r)/(q+r)) (Cq + E[f'(inf X(e_{q+r}) + b)]).
CheckReport check_m_derivative(const Valuator& val, const std::vector<double>& b_grid, const VerifyOptions& opt = {});

/// (a) tau_0^- killed q-resolvent vs Monte Carlo, (b) total mass of the (q+r)-resolvent,
/// (c) Theta vs the tau_0^+ killed (q+r)-resolvent by Monte Carlo.
CheckReport check_resolvent_identities(const Valuator& val, const VerifyOptions& opt = {});

/// r_b(x, y) >= -1e-10 on a grid around b.
CheckReport check_density_positivity(const Valuator& val, double b, const VerifyOptions& opt = {});

/// Names accepted by run_checks, in execution order.
const std::vector<std::string>& available_checks();

/// Runs the named checks at b (or the solved barrier when unset). Throws
/// std::invalid_argument for an unknown name.
std::vector<CheckReport> run_checks(const Valuator& val, const std::vector<std::string>& names,
                                    std::optional<double> b, const VerifyOptions& opt = {});

}  // namespace levy_replenish
