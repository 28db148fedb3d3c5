#pragma once

#include <functional>
#include <vector>

namespace levy_replenish {

struct QuadratureConfig {
  double rtol = 1e-10;
  double atol = 1e-12;
  unsigned max_depth = 15;
  /// Upper bound on the number of panels used for a semi-infinite range.
  int max_panels = 400;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod on [a, b], split at the interior points of `breaks`.
/// Throws NumericalError when the error estimate stays above tolerance.
QuadResult integrate(const Integrand& f, double a, double b, const std::vector<double>& breaks,
                     const QuadratureConfig& cfg);

/// int_{-inf}^{b} f(y) dy for integrands decaying like poly(b - y) * exp(-decay (b - y)).
/// Integrates panels of width ~4/decay outward from b until a panel contributes below
/// tolerance; the last panel's L1 mass is added to the error estimate.
QuadResult integrate_lower_tail(const Integrand& f, double b, double decay, const std::vector<double>& breaks,
                                const QuadratureConfig& cfg);

}  // namespace levy_replenish
