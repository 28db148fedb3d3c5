#pragma once

// Spectrally negative Levy inventory model X(t) = x + mu*t + sigma*B(t) - sum J_i, the
// running-cost model, and the validated problem instance consumed by every other module.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "levy_replenish/polynomial.hpp"

namespace levy_replenish {

enum class Side { kLeft, kRight };

/// Law of a single demand jump (a positive random size). Either a hyperexponential mixture
/// sum_i p_i Exp(eta_i) or a general phase-type pair (alpha, T) with exit vector t = -T*1.
class JumpLaw {
 public:
  enum class Form { kNone, kHyperexponential, kPhaseType };

  JumpLaw() = default;

  /// Components with zero weight are dropped and equal rates merged.
  static JumpLaw hyperexponential(std::vector<double> weights, std::vector<double> rates);
  static JumpLaw phase_type(Eigen::VectorXd alpha, Eigen::MatrixXd generator);

  Form form() const { return form_; }
  int phases() const;

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<double>& rates() const { return rates_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::MatrixXd& generator() const { return generator_; }
  Eigen::VectorXd exit_vector() const;

  /// E[exp(-theta J)], defined for Re(theta) > -decay_rate().
  std::complex<double> transform(std::complex<double> theta) const;
  /// d/dtheta E[exp(-theta J)] = -E[J exp(-theta J)].
  std::complex<double> transform_derivative(std::complex<double> theta) const;

  double mean() const;
  /// Exponential decay rate of the jump density (eta_min); the transform is finite for
  /// theta > -decay_rate().
  double decay_rate() const;
  double density(double z) const;

  /// transform(theta) == numerator(theta) / denominator(theta); denominator is monic of
  /// degree phases().
  Polynomial numerator() const;
  Polynomial denominator() const;

  /// Structural invariant violations (empty when the law is well formed).
  std::vector<std::string> invariant_violations() const;

 private:
  Form form_ = Form::kNone;
  std::vector<double> weights_;
  std::vector<double> rates_;
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd generator_;
};

struct LevyModel {
  double mu = 0.0;      ///< drift, inventory units per unit time
  double sigma = 0.0;   ///< Gaussian coefficient, inventory units per sqrt(time)
  double lambda = 0.0;  ///< demand-jump arrival rate
  JumpLaw jumps;
  /// Test-only: accept monotone-path models (pure drift).
  bool allow_degenerate = false;
};

bool bounded_variation(const LevyModel& model);

/// kappa(theta) = sigma^2 theta^2 / 2 + mu theta + lambda (E[exp(-theta J)] - 1).
/// Throws DomainError when theta <= -decay_rate of the jump law.
double laplace_exponent(const LevyModel& model, double theta);
std::complex<double> laplace_exponent(const LevyModel& model, std::complex<double> theta);

double kappa_prime(const LevyModel& model, double theta);
std::complex<double> kappa_prime(const LevyModel& model, std::complex<double> theta);

/// Largest root of kappa(theta) = rate. Bracketed bisection, polished by Newton.
double phi(const LevyModel& model, double rate);

/// Piecewise polynomial on the real line; pieces[i] is used on [breakpoints[i-1],
/// breakpoints[i]) with the obvious conventions at the ends.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial() : pieces_{Polynomial{}} { init(); }
  explicit PiecewisePolynomial(Polynomial single) : pieces_{std::move(single)} { init(); }
  PiecewisePolynomial(std::vector<double> breakpoints, std::vector<Polynomial> pieces);

  /// 1 on [lo, hi], 0 elsewhere.
  static PiecewisePolynomial indicator(double lo, double hi);

  double operator()(double x) const;
  double derivative(double x, Side side = Side::kRight) const;
  PiecewisePolynomial derivative() const;

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<Polynomial>& pieces() const { return pieces_; }
  std::size_t piece_index(double x) const;
  int degree() const;

  /// Slope limit at +infinity (direction > 0) or -infinity (direction < 0); may be infinite.
  double limit_slope(int direction) const;

  /// Closed form of int_a^inf g(y) exp(-decay (y - a)) dy, decay > 0.
  double exp_tail_integral(double a, double decay) const;

  /// int_0^len exp(-rate s) g(u0 + slope s) ds, exact for each polynomial piece.
  double discounted_linear_integral(double u0, double slope, double len, double rate) const;

 private:
  void init();
  double segment(std::size_t piece, double ua, double slope, double s0, double len, double rate) const;

  std::vector<double> breakpoints_;
  std::vector<Polynomial> pieces_;
  /// derivs_[i][n] is the n-th derivative of pieces_[i], up to the zero polynomial.
  std::vector<std::vector<Polynomial>> derivs_;
};

enum class CostKind { kQuadratic, kPiecewiseLinear, kPolynomial };

std::string_view cost_kind_name(CostKind kind);

/// Convex running inventory cost f.
struct CostModel {
  CostKind kind = CostKind::kQuadratic;
  PiecewisePolynomial f{Polynomial{0.0, 0.0, 1.0}};
  double holding = 0.0;   ///< h, piecewise-linear only
  double shortage = 0.0;  ///< p, piecewise-linear only
  std::vector<double> coefficients;  ///< ascending, polynomial only

  static CostModel quadratic();
  static CostModel piecewise_linear(double holding, double shortage);
  static CostModel polynomial(std::vector<double> ascending);

  double operator()(double x) const { return f(x); }
  double slope(double x, Side side = Side::kRight) const { return f.derivative(x, side); }
};

struct ProblemSpec {
  LevyModel model;
  double q = 0.0;  ///< discount rate
  double r = 0.0;  ///< rate of replenishment opportunities
  double C = 0.0;  ///< unit replenishment cost (may be negative)
  CostModel cost;
};

enum class Assumption {
  kPositiveRates,        ///< q > 0, r > 0, finite parameters
  kJumpLaw,              ///< jump law well formed
  kNonMonotonePath,      ///< X is not a pure drift nor the negative of a subordinator
  kExponentialMoment,    ///< exp(theta |J|) integrable for some theta > 0
  kCostConvexity,        ///< f convex
  kCostSlope,            ///< f'(-inf) < -C q < f'(+inf)
};

std::string_view assumption_name(Assumption a);

struct ValidationIssue {
  Assumption assumption;
  std::string message;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<ValidationIssue> issues);
  const std::vector<ValidationIssue>& issues() const { return issues_; }

 private:
  std::vector<ValidationIssue> issues_;
};

/// Every violated standing assumption, in a fixed order.
std::vector<ValidationIssue> check_assumptions(const ProblemSpec& spec);

/// A problem instance that passed validation. Immutable.
class ValidatedSpec {
 public:
  const ProblemSpec& problem() const { return spec_; }
  const LevyModel& model() const { return spec_.model; }
  const CostModel& cost() const { return spec_.cost; }
  double q() const { return spec_.q; }
  double r() const { return spec_.r; }
  double C() const { return spec_.C; }

  double phi_q() const { return phi_q_; }
  double phi_qr() const { return phi_qr_; }
  /// kappa'(0+) = E[X(1)] - x.
  double mean_drift() const { return mean_drift_; }

  ValidatedSpec with_C(double C) const;
  ValidatedSpec with_r(double r) const;

 private:
  friend ValidatedSpec validate(ProblemSpec spec);
  explicit ValidatedSpec(ProblemSpec spec);

  ProblemSpec spec_;
  double phi_q_ = 0.0;
  double phi_qr_ = 0.0;
  double mean_drift_ = 0.0;
};

/// Throws ValidationError listing every violated assumption.
ValidatedSpec validate(ProblemSpec spec);

}  // namespace levy_replenish
