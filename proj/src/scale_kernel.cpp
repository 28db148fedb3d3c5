#include "levy_replenish/scale_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "levy_replenish/errors.hpp"

namespace levy_replenish {

namespace {

using cd = std::complex<double>;

// (exp(z x) - 1) / z, including z -> 0.
cd expm1_over(cd zz, double x) {
  const cd t = zz * x;
  if (std::abs(t) < 0.5) {
    cd term = x;
    cd acc = term;
    for (int n = 2; n < 30; ++n) {
      term *= t / static_cast<double>(n);
      acc += term;
      if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  return (std::exp(t) - 1.0) / zz;
}

// (exp(z x) - 1 - z x) / z^2.
cd expm1x_over2(cd zz, double x) {
  const cd t = zz * x;
  if (std::abs(t) < 0.5) {
    cd term = 0.5 * x * x;
    cd acc = term;
    for (int n = 3; n < 32; ++n) {
      term *= t / static_cast<double>(n);
      acc += term;
      if (std::abs(term) < 1e-18 * std::abs(acc)) break;
    }
    return acc;
  }
  return (std::exp(t) - 1.0 - t) / (zz * zz);
}

Polynomial root_polynomial(const LevyModel& model, double s) {
  const Polynomial d = model.jumps.denominator();
  const Polynomial n = model.jumps.numerator();
  const double lam = model.lambda > 0.0 ? model.lambda : 0.0;
  const Polynomial quad{-lam - s, model.mu, 0.5 * model.sigma * model.sigma};
  if (lam == 0.0) return quad;
  return quad * d + lam * n;
}

cd newton_polish(const Polynomial& p, const Polynomial& dp, cd z) {
  for (int it = 0; it < 8; ++it) {
    const cd fz = p(z);
    const cd dz = dp(z);
    if (std::abs(dz) == 0.0) break;
    const cd step = fz / dz;
    const cd next = z - step;
    if (std::abs(p(next)) >= std::abs(fz)) break;
    z = next;
    if (std::abs(step) <= 1e-16 * std::abs(z)) break;
  }
  return z;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

cd sum_exp(const ScaleBasis& b, double x, std::size_t from = 0) {
  cd acc = 0.0;
  for (std::size_t k = from; k < b.size(); ++k) acc += b.coefficients[k] * std::exp(b.roots[k] * x);
  return acc;
}

}  // namespace

ScaleBasis build_basis(const LevyModel& model, double rate) {
  if (!(rate > 0.0)) throw DomainError("build_basis: rate must be positive");
  ScaleBasis basis;
  basis.rate = rate;
  basis.model = model;
  basis.bounded_variation = bounded_variation(model);

  const Polynomial poly = root_polynomial(model, rate);
  const Polynomial dpoly = poly.derivative();
  std::vector<cd> raw = polynomial_roots(poly);
  for (auto& z : raw) z = newton_polish(poly, dpoly, z);

  double scale = 1.0;
  for (const auto& z : raw) scale = std::max(scale, std::abs(z));
  for (std::size_t i = 0; i < raw.size(); ++i)
    for (std::size_t j = i + 1; j < raw.size(); ++j)
      if (std::abs(raw[i] - raw[j]) < 1e-8 * scale)
        throw NumericalError("build_basis: near-multiple roots of kappa(theta) = " + fmt(rate) + " near " +
                             fmt(raw[i].real()) + (raw[i].imag() != 0.0 ? " + i*" + fmt(raw[i].imag()) : "") +
                             "; perturb the model parameters slightly");

  // Snap nearly-real roots to the real axis and complex ones to exact conjugate pairs.
  for (auto& z : raw)
    if (std::abs(z.imag()) <= 1e-12 * scale) z = cd(z.real(), 0.0);
  std::vector<cd> roots;
  std::vector<bool> used(raw.size(), false);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (used[i]) continue;
    used[i] = true;
    if (raw[i].imag() == 0.0) {
      roots.push_back(raw[i]);
      continue;
    }
    std::size_t best = i;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < raw.size(); ++j) {
      if (used[j]) continue;
      const double d = std::abs(raw[j] - std::conj(raw[i]));
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best == i || best_d > 1e-6 * scale) throw NumericalError("build_basis: complex root without conjugate partner");
    used[best] = true;
    const cd avg = 0.5 * (raw[i] + std::conj(raw[best]));
    roots.push_back(cd(avg.real(), std::abs(avg.imag())));
    roots.push_back(cd(avg.real(), -std::abs(avg.imag())));
  }
  std::stable_sort(roots.begin(), roots.end(), [](const cd& a, const cd& b) { return a.real() > b.real(); });

  const double phi_s = phi(model, rate);
  if (!(roots.front().real() > 0.0) || std::abs(roots.front() - cd(phi_s, 0.0)) > 1e-8 * std::max(1.0, phi_s))
    throw NumericalError("build_basis: largest root " + fmt(roots.front().real()) + " disagrees with Phi = " + fmt(phi_s));
  roots.front() = cd(phi_s, 0.0);
  for (std::size_t k = 1; k < roots.size(); ++k)
    if (!(roots[k].real() < 0.0))
      throw NumericalError("build_basis: secondary root with nonnegative real part " + fmt(roots[k].real()));

  basis.roots = roots;
  basis.coefficients.resize(roots.size());
  for (std::size_t k = 0; k < roots.size(); ++k) {
    basis.coefficients[k] = 1.0 / kappa_prime(model, roots[k]);
    if (roots[k].imag() == 0.0) basis.coefficients[k] = cd(basis.coefficients[k].real(), 0.0);
  }
  for (std::size_t k = 1; k < roots.size(); ++k)
    if (roots[k].imag() > 0.0) basis.coefficients[k + 1] = std::conj(basis.coefficients[k]);

  cd w0 = 0.0;
  cd w1 = 0.0;
  for (std::size_t k = 0; k < roots.size(); ++k) {
    w0 += basis.coefficients[k];
    w1 += basis.coefficients[k] * roots[k];
  }
  basis.w_at_zero = basis.bounded_variation ? 1.0 / model.mu : 0.0;
  if (std::abs(w0.real() - basis.w_at_zero) > 1e-8 * std::max(1.0, basis.w_at_zero))
    throw NumericalError("build_basis: sum of coefficients " + fmt(w0.real()) + " differs from W(0) = " +
                         fmt(basis.w_at_zero));
  basis.w_prime_at_zero = w1.real();
  return basis;
}

nlohmann::json basis_to_json(const ScaleBasis& basis) {
  nlohmann::json roots = nlohmann::json::array();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    roots.push_back({{"root", {basis.roots[k].real(), basis.roots[k].imag()}},
                     {"coefficient", {basis.coefficients[k].real(), basis.coefficients[k].imag()}}});
  }
  return {{"rate", basis.rate},
          {"phi", basis.phi()},
          {"bounded_variation", basis.bounded_variation},
          {"w_at_zero", basis.w_at_zero},
          {"w_prime_at_zero", basis.w_prime_at_zero},
          {"terms", roots}};
}

double w(const ScaleBasis& basis, double x) {
  if (x < 0.0) return 0.0;
  return sum_exp(basis, x).real();
}

double w_prime(const ScaleBasis& basis, double x) {
  if (x < 0.0) return 0.0;
  cd acc = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    acc += basis.coefficients[k] * basis.roots[k] * std::exp(basis.roots[k] * x);
  return acc.real();
}

double w_transient(const ScaleBasis& basis, double x) {
  if (x < 0.0) return 0.0;
  return sum_exp(basis, x, 1).real();
}

double w_bar(const ScaleBasis& basis, double x) {
  if (x <= 0.0) return 0.0;
  cd acc = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) acc += basis.coefficients[k] * expm1_over(basis.roots[k], x);
  return acc.real();
}

double z(const ScaleBasis& basis, double x) { return 1.0 + basis.rate * w_bar(basis, x); }

double z_bar(const ScaleBasis& basis, double x) {
  if (x <= 0.0) return x;
  cd acc = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) acc += basis.coefficients[k] * expm1x_over2(basis.roots[k], x);
  return x + basis.rate * acc.real();
}

double z_theta(const ScaleBasis& basis, double x, double theta) {
  if (x <= 0.0) return std::exp(theta * x);
  const double gap = basis.rate - laplace_exponent(basis.model, theta);
  bool near_root = false;
  for (const auto& zeta : basis.roots)
    if (std::abs(cd(theta, 0.0) - zeta) < 1e-3 * (1.0 + std::abs(zeta))) near_root = true;
  if (near_root) {
    cd acc = 0.0;
    for (std::size_t k = 0; k < basis.size(); ++k)
      acc += basis.coefficients[k] * expm1_over(basis.roots[k] - theta, x);
    return std::exp(theta * x) * (1.0 + gap * acc.real());
  }
  // Partial fractions sum_k c_k / (theta - zeta_k) = 1 / (kappa(theta) - s) remove the
  // exp(theta x) growth exactly.
  cd acc = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k)
    acc += basis.coefficients[k] * std::exp(basis.roots[k] * x) / (theta - basis.roots[k]);
  return -gap * acc.real();
}

// ---------------------------------------------------------------------------------------
// KernelPair. Notation: alpha_j, a_j for the q basis, beta_k, c_k for the q+r basis.

KernelPair::KernelPair(const LevyModel& model, double q, double r)
    : q_(q), r_(r), bq_(build_basis(model, q)), bp_(build_basis(model, q + r)) {}

double KernelPair::z_qr(double x) const {
  return (r_ * z(bq_, x) + q_ * z_theta(bq_, x, phi_p())) / p();
}

double KernelPair::z_qr_prime(double x) const {
  if (x < 0.0) return q_ / p() * phi_p() * std::exp(phi_p() * x);
  return q_ / p() * phi_p() * z_theta(bq_, x, phi_p());
}

double KernelPair::w_shift(double y, double x) const {
  if (y >= 0.0) return w(bq_, x - y);
  const double len = std::min(-y, x - y);
  if (len <= 0.0) return w(bq_, x - y);
  cd acc = 0.0;
  for (std::size_t j = 0; j < bq_.size(); ++j) {
    cd inner = 0.0;
    for (std::size_t k = 0; k < bp_.size(); ++k)
      inner += bp_.coefficients[k] * expm1_over(bp_.roots[k] - bq_.roots[j], len);
    acc += bq_.coefficients[j] * std::exp(bq_.roots[j] * (x - y)) * inner;
  }
  return w(bq_, x - y) + r_ * acc.real();
}

double KernelPair::w_shift_alt(double y, double x) const {
  const double lo = std::max(0.0, y);
  if (x <= lo) return w(bp_, x - y);
  cd acc = 0.0;
  for (std::size_t j = 0; j < bq_.size(); ++j)
    for (std::size_t k = 0; k < bp_.size(); ++k) {
      const cd a = bq_.roots[j];
      const cd b = bp_.roots[k];
      acc += bq_.coefficients[j] * bp_.coefficients[k] * std::exp(a * (x - lo) + b * (lo - y)) *
             expm1_over(b - a, x - lo);
    }
  return w(bp_, x - y) - r_ * acc.real();
}

double KernelPair::h_kernel(double x, double theta) const {
  if (x < 0.0) return std::exp(theta * x);
  const double b1 = phi_p();
  if (std::abs(theta - b1) <= 1e-12 * b1)
    throw DomainError("h_kernel: theta equals Phi(q+r) = " + fmt(b1) + " (pole)");
  const double gap = laplace_exponent(bp_.model, theta) - p();
  cd acc = 0.0;
  for (std::size_t k = 1; k < bp_.size(); ++k) {
    const cd b = bp_.roots[k];
    acc += bp_.coefficients[k] * std::exp(b * x) * (b - b1) / (theta - b);
  }
  return gap * acc.real() / (theta - b1);
}

double KernelPair::theta_kernel(double x, double y) const {
  const double b1 = phi_p();
  if (y > 0.0) return -w(bp_, x - y);
  if (x < y) {
    cd acc = 0.0;
    for (std::size_t k = 0; k < bp_.size(); ++k)
      acc += bp_.coefficients[k] * std::exp(b1 * x - bp_.roots[k] * y);
    return acc.real();
  }
  const double e1 = std::exp(b1 * x);
  cd acc = 0.0;
  for (std::size_t k = 1; k < bp_.size(); ++k) {
    const cd b = bp_.roots[k];
    acc += bp_.coefficients[k] * (e1 * std::exp(-b * y) - std::exp(b * (x - y)));
  }
  return acc.real();
}

double KernelPair::upsilon(double x, double y) const {
  if (y > 0.0) return w(bq_, x - y);
  if (x < 0.0) return -theta_kernel(x, y);
  const cd b1 = bp_.roots[0];
  cd acc = 0.0;
  for (std::size_t j = 0; j < bq_.size(); ++j) {
    const cd a = bq_.roots[j];
    for (std::size_t k = 1; k < bp_.size(); ++k) {
      const cd b = bp_.roots[k];
      acc += bq_.coefficients[j] * bp_.coefficients[k] * std::exp(a * x - b * y) * (b1 - b) / ((b - a) * (b1 - a));
    }
  }
  return r_ * acc.real();
}

double KernelPair::psi(double x, double y) const {
  const double b1r = phi_p();
  if (y >= 0.0) return w(bq_, x - y) - b1r / p() * z_theta(bq_, x, b1r);
  const cd b1 = bp_.roots[0];
  if (x >= 0.0) {
    cd acc = 0.0;
    for (std::size_t j = 0; j < bq_.size(); ++j) {
      const cd a = bq_.roots[j];
      for (std::size_t k = 1; k < bp_.size(); ++k) {
        const cd b = bp_.roots[k];
        acc += bq_.coefficients[j] * bp_.coefficients[k] * std::exp(a * x - b * y) * a * (b1 - b) /
               (b * (b - a) * (b1 - a));
      }
    }
    return r_ * acc.real();
  }
  cd acc = 0.0;
  if (x >= y) {
    for (std::size_t k = 1; k < bp_.size(); ++k) {
      const cd b = bp_.roots[k];
      acc += bp_.coefficients[k] * (std::exp(b * (x - y)) - b1 / b * std::exp(b1 * x - b * y));
    }
  } else {
    for (std::size_t k = 0; k < bp_.size(); ++k) {
      const cd b = bp_.roots[k];
      acc -= bp_.coefficients[k] * b1 / b * std::exp(b1 * x - b * y);
    }
  }
  return acc.real();
}

double KernelPair::infimum_atom() const { return p() / phi_p() * bp_.w_at_zero; }

double KernelPair::infimum_density(double y) const {
  if (y <= 0.0) return 0.0;
  cd acc = 0.0;
  for (std::size_t k = 1; k < bp_.size(); ++k)
    acc += bp_.coefficients[k] * (bp_.roots[k] - bp_.roots[0]) * std::exp(bp_.roots[k] * y);
  return p() / phi_p() * acc.real();
}

double KernelPair::decay_rate() const {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < bp_.size(); ++k) d = std::min(d, -bp_.roots[k].real());
  for (std::size_t k = 1; k < bq_.size(); ++k) d = std::min(d, -bq_.roots[k].real());
  return d;
}

}  // namespace levy_replenish
