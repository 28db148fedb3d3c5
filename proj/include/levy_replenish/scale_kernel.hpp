#pragma once

// Scale functions of a spectrally negative Levy process with rational Laplace exponent.
// W^(s)(x) = sum_k c_k exp(zeta_k x) for x >= 0, where zeta_k are the roots of kappa = s and
// c_k = 1 / kappa'(zeta_k). Every kernel below is evaluated from that exponential basis.

#include <complex>
#include <vector>

#include "json.hpp"
#include "levy_replenish/levy_model.hpp"

namespace levy_replenish {

struct ScaleBasis {
  double rate = 0.0;
  /// roots[0] is Phi(rate) (real, positive); the others have negative real part.
  std::vector<std::complex<double>> roots;
  std::vector<std::complex<double>> coefficients;
  bool bounded_variation = false;
  double w_at_zero = 0.0;
  /// Right derivative W'(0+).
  double w_prime_at_zero = 0.0;
  LevyModel model;

  double phi() const { return roots.front().real(); }
  std::size_t size() const { return roots.size(); }
};

/// Throws NumericalError when two roots are closer than 1e-8 * scale.
ScaleBasis build_basis(const LevyModel& model, double rate);

nlohmann::json basis_to_json(const ScaleBasis& basis);

double w(const ScaleBasis& basis, double x);
/// Right derivative for x = 0, zero for x < 0.
double w_prime(const ScaleBasis& basis, double x);
/// W(x) - exp(Phi x) / kappa'(Phi) for x >= 0.
double w_transient(const ScaleBasis& basis, double x);
double w_bar(const ScaleBasis& basis, double x);
double z(const ScaleBasis& basis, double x);
double z_bar(const ScaleBasis& basis, double x);
/// Z^(s)(x, theta); equals exp(theta x) for x <= 0.
double z_theta(const ScaleBasis& basis, double x, double theta);

/// Kernels that couple the q and q+r scale functions.
class KernelPair {
 public:
  KernelPair(const LevyModel& model, double q, double r);

  const ScaleBasis& q_basis() const { return bq_; }
  const ScaleBasis& p_basis() const { return bp_; }
  double q() const { return q_; }
  double r() const { return r_; }
  double p() const { return q_ + r_; }
  double phi_q() const { return bq_.phi(); }
  double phi_p() const { return bp_.phi(); }

  double z_qr(double x) const;
  double z_qr_prime(double x) const;

  /// W_y^(q,r)(x) from the representation W^(q)(x-y) + r int_0^{-y} W^(q)(x-u-y) W^(q+r)(u) du.
  double w_shift(double y, double x) const;
  /// Same function from W^(q+r)(x-y) - r int_0^x W^(q)(x-z) W^(q+r)(z-y) dz.
  double w_shift_alt(double y, double x) const;

  /// H^(q+r)(x, theta). Throws DomainError at theta == Phi(q+r).
  double h_kernel(double x, double theta) const;
  double theta_kernel(double x, double y) const;
  double upsilon(double x, double y) const;
  double psi(double x, double y) const;

  /// Law of -inf_{t <= e} X(t) for e ~ Exp(q+r): atom at 0 and density on (0, inf).
  double infimum_atom() const;
  double infimum_density(double y) const;

  /// Smallest exponential decay rate shared by the kernels, used to truncate
  /// semi-infinite integrals.
  double decay_rate() const;

 private:
  double q_;
  double r_;
  ScaleBasis bq_;
  ScaleBasis bp_;
};

}  // namespace levy_replenish
