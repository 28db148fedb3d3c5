#pragma once

// Expected discounted cost of the periodic barrier policy: at each Poisson(r) observation
// time the inventory is raised to b if it is below b.

#include <string>
#include <vector>

#include "json.hpp"
#include "levy_replenish/levy_model.hpp"
#include "levy_replenish/quadrature.hpp"
#include "levy_replenish/scale_kernel.hpp"

namespace levy_replenish {

/// Quantities depending on the barrier only, shared by every x.
struct BarrierTerms {
  double b = 0.0;
  double F = 0.0;            ///< F(b), integral form
  double F_alt = 0.0;        ///< F(b) from the f' form
  double M = 0.0;            ///< M^(q,r)(b)
  double int_f = 0.0;        ///< int f(y) H^(q+r)(b-y, Phi(q)) dy
  double int_fprime = 0.0;   ///< int f'(y) H^(q+r)(b-y, Phi(q)) dy
  double error = 0.0;        ///< accumulated quadrature error estimate
};

struct ValuationReport {
  double b = 0.0;
  double x = 0.0;
  double value = 0.0;
  double derivative = 0.0;
  double control_cost = 0.0;
  double inventory_cost = 0.0;
  double F = 0.0;
  double M = 0.0;
  double error = 0.0;
  double rtol = 0.0;
  double atol = 0.0;
};

nlohmann::json to_json(const ValuationReport& r);
std::string csv_header();
std::string to_csv_row(const ValuationReport& r);

class Valuator {
 public:
  enum class Branch { kAuto, kUpper, kLower };

  explicit Valuator(ValidatedSpec spec, QuadratureConfig cfg = {});

  const ValidatedSpec& spec() const { return spec_; }
  const KernelPair& kernels() const { return kernels_; }
  const QuadratureConfig& config() const { return cfg_; }

  BarrierTerms barrier_terms(double b) const;

  /// E_x[int e^{-qt} dR(t)], closed form.
  double control_cost(double b, double x) const;
  /// Same quantity assembled from Z^(q,r) and Zbar^(q) (grows in cancellation for x >> b).
  double control_cost_assembled(double b, double x) const;

  double resolvent_density(double b, double x, double y) const;
  /// int_lo^hi r_b(x, y) dy.
  QuadResult occupation(double b, double x, double lo, double hi) const;

  double big_f(double b) const { return barrier_terms(b).F; }
  double big_f_alt(double b) const { return barrier_terms(b).F_alt; }
  double m_func(double b) const { return barrier_terms(b).M; }

  double value(double b, double x, Branch branch = Branch::kAuto) const;
  double value(const BarrierTerms& t, double x, Branch branch = Branch::kAuto, double* error = nullptr) const;
  double value_derivative(double b, double x) const;
  double value_derivative(const BarrierTerms& t, double x, double* error = nullptr) const;

  /// int_{-inf}^{b} g(y) Theta^(q+r)(x-b, y-b) dy for x <= b: discounted g-cost until X
  /// first exceeds b, killed at rate r.
  QuadResult theta_integral(double b, double x, const PiecewisePolynomial& g) const;

  ValuationReport report(const BarrierTerms& t, double x) const;
  ValuationReport report(double b, double x) const { return report(barrier_terms(b), x); }

 private:
  QuadResult lower_tail(const Integrand& g, double b, std::vector<double> breaks) const;
  std::vector<double> kinks() const { return spec_.cost().f.breakpoints(); }

  ValidatedSpec spec_;
  QuadratureConfig cfg_;
  KernelPair kernels_;
  PiecewisePolynomial fprime_;
};

}  // namespace levy_replenish
