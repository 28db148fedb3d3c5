#include "levy_replenish/valuation.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>

namespace levy_replenish {

namespace {
using cd = std::complex<double>;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

Valuator::Valuator(ValidatedSpec spec, QuadratureConfig cfg)
    : spec_(std::move(spec)),
      cfg_(cfg),
      kernels_(spec_.model(), spec_.q(), spec_.r()),
      fprime_(spec_.cost().f.derivative()) {}

QuadResult Valuator::lower_tail(const Integrand& g, double b, std::vector<double> breaks) const {
  for (double k : kinks()) breaks.push_back(k);
  return integrate_lower_tail(g, b, kernels_.decay_rate(), breaks, cfg_);
}

BarrierTerms Valuator::barrier_terms(double b) const {
  const double q = spec_.q();
  const double r = spec_.r();
  const double p = q + r;
  const double C = spec_.C();
  const double pq = kernels_.phi_q();
  const double pp = kernels_.phi_p();
  const PiecewisePolynomial& f = spec_.cost().f;

  const QuadResult lf = lower_tail([&](double y) { return f(y) * kernels_.h_kernel(b - y, pq); }, b, {});
  const QuadResult lfp = lower_tail([&](double y) { return fprime_(y) * kernels_.h_kernel(b - y, pq); }, b, {});
  const QuadResult lfp0 = lower_tail([&](double y) { return fprime_(y) * kernels_.h_kernel(b - y, 0.0); }, b, {});

  BarrierTerms t;
  t.b = b;
  t.int_f = f.exp_tail_integral(b, pq) + lf.value;
  t.int_fprime = fprime_.exp_tail_integral(b, pq) + lfp.value;
  const double ratio = (pp - pq) / pp;
  t.F = ratio * (p / (q * r) * pq * t.int_f + C / pq);
  t.F_alt = (f(b) - lfp0.value) / q + ratio * (p / (q * r) * t.int_fprime + C / pq);
  t.M = (pp - pq) / r * t.int_fprime + q / p * pp / pq * C;
  t.error = ratio * p / (q * r) * pq * lf.error + lfp.error + lfp0.error / q;
  return t;
}

double Valuator::control_cost(double b, double x) const {
  const double q = spec_.q();
  const double r = spec_.r();
  const double p = q + r;
  const double u = x - b;
  if (u < 0.0) return control_cost_assembled(b, x);
  const ScaleBasis& bq = kernels_.q_basis();
  const cd a1 = bq.roots[0];
  const cd b1 = kernels_.p_basis().roots[0];
  cd acc = 0.0;
  for (std::size_t j = 1; j < bq.size(); ++j) {
    const cd a = bq.roots[j];
    acc += bq.coefficients[j] * std::exp(a * u) / a * ((b1 - a1) / (a1 * (b1 - a)) - 1.0 / a);
  }
  return r * q / p * acc.real();
}

double Valuator::control_cost_assembled(double b, double x) const {
  const double q = spec_.q();
  const double r = spec_.r();
  const double pq = kernels_.phi_q();
  const double pp = kernels_.phi_p();
  const double u = x - b;
  return (pp - pq) / (pp * pq) * kernels_.z_qr(u) -
         r / (q + r) * (z_bar(kernels_.q_basis(), u) + spec_.mean_drift() / q);
}

double Valuator::resolvent_density(double b, double x, double y) const {
  const double q = spec_.q();
  const double r = spec_.r();
  const double pq = kernels_.phi_q();
  const double pp = kernels_.phi_p();
  const double k = (q + r) / (q * r) * pq * (pp - pq) / pp;
  return k * kernels_.z_qr(x - b) * kernels_.h_kernel(b - y, pq) - kernels_.upsilon(x - b, y - b);
}

QuadResult Valuator::occupation(double b, double x, double lo, double hi) const {
  if (!(hi > lo)) return {};
  const double top = std::max(b, x);
  QuadResult total;
  auto dens = [&](double y) { return resolvent_density(b, x, y); };
  if (hi > top && hi == kInf) {
    const double q = spec_.q();
    const double r = spec_.r();
    const double pq = kernels_.phi_q();
    const double pp = kernels_.phi_p();
    const double k = (q + r) / (q * r) * pq * (pp - pq) / pp;
    const double from = std::max(lo, top);
    total.value += k * kernels_.z_qr(x - b) * std::exp(pq * (b - from)) / pq;
    hi = from;
  }
  if (!(hi > lo)) return total;
  if (lo == -kInf) {
    const double mid = std::min(hi, std::min(b, x));
    total += integrate_lower_tail(dens, mid, kernels_.decay_rate(), {}, cfg_);
    if (hi > mid) total += integrate(dens, mid, hi, {b, x}, cfg_);
    return total;
  }
  total += integrate(dens, lo, hi, {b, x}, cfg_);
  return total;
}

double Valuator::value(double b, double x, Branch branch) const {
  return value(barrier_terms(b), x, branch);
}

double Valuator::value(const BarrierTerms& t, double x, Branch branch, double* error) const {
  const double q = spec_.q();
  const double r = spec_.r();
  const double p = q + r;
  const double C = spec_.C();
  const double b = t.b;
  const double u = x - b;
  const double kp0 = spec_.mean_drift();
  const PiecewisePolynomial& f = spec_.cost().f;
  if (branch == Branch::kAuto) branch = x >= b ? Branch::kUpper : Branch::kLower;

  double err = t.error;
  double v = 0.0;
  if (branch == Branch::kUpper) {
    QuadResult above;
    if (x > b)
      above = integrate([&](double y) { return f(y) * w(kernels_.q_basis(), x - y); }, b, x, kinks(), cfg_);
    const QuadResult below =
        lower_tail([&](double y) { return f(y) * kernels_.upsilon(u, y - b); }, b, {x});
    v = t.F * kernels_.z_qr(u) - above.value - below.value -
        C * r / p * (z_bar(kernels_.q_basis(), u) + kp0 / q);
    err += above.error + below.error;
  } else {
    const QuadResult below =
        lower_tail([&](double y) { return f(y) * kernels_.theta_kernel(u, y - b); }, b, {x});
    v = t.F * (r + q * std::exp(kernels_.phi_p() * u)) / p + below.value - C * r / p * (u + kp0 / q);
    err += below.error;
  }
  if (error) *error = err;
  return v;
}

double Valuator::value_derivative(double b, double x) const { return value_derivative(barrier_terms(b), x); }

double Valuator::value_derivative(const BarrierTerms& t, double x, double* error) const {
  const double q = spec_.q();
  const double r = spec_.r();
  const double p = q + r;
  const double C = spec_.C();
  const double b = t.b;
  const double u = x - b;
  const double pp = kernels_.phi_p();
  const PiecewisePolynomial& f = spec_.cost().f;

  QuadResult conv;
  if (x > b)
    conv = integrate([&](double y) { return w(kernels_.q_basis(), x - y) * fprime_(y); }, b, x, kinks(), cfg_);
  const QuadResult below = lower_tail([&](double y) { return fprime_(y) * kernels_.psi(u, y - b); }, b, {x});
  if (error) *error = t.error + conv.error + below.error;
  return (q * t.F - f(b)) * pp / p * z_theta(kernels_.q_basis(), u, pp) - conv.value - below.value -
         C * r / p * z(kernels_.q_basis(), u);
}

QuadResult Valuator::theta_integral(double b, double x, const PiecewisePolynomial& g) const {
  std::vector<double> breaks = g.breakpoints();
  breaks.push_back(x);
  return integrate_lower_tail([&](double y) { return g(y) * kernels_.theta_kernel(x - b, y - b); }, b,
                              kernels_.decay_rate(), breaks, cfg_);
}

ValuationReport Valuator::report(const BarrierTerms& t, double x) const {
  ValuationReport rep;
  rep.b = t.b;
  rep.x = x;
  double e1 = 0.0;
  double e2 = 0.0;
  rep.value = value(t, x, Branch::kAuto, &e1);
  rep.derivative = value_derivative(t, x, &e2);
  rep.control_cost = control_cost(t.b, x);
  rep.inventory_cost = rep.value - spec_.C() * rep.control_cost;
  rep.F = t.F;
  rep.M = t.M;
  rep.error = std::max(e1, e2);
  rep.rtol = cfg_.rtol;
  rep.atol = cfg_.atol;
  return rep;
}

nlohmann::json to_json(const ValuationReport& r) {
  return {{"b", r.b},
          {"x", r.x},
          {"value", r.value},
          {"derivative", r.derivative},
          {"control_cost", r.control_cost},
          {"inventory_cost", r.inventory_cost},
          {"F", r.F},
          {"M", r.M},
          {"error_estimate", r.error},
          {"quadrature", {{"rtol", r.rtol}, {"atol", r.atol}}}};
}

std::string csv_header() { return "b,x,v,v_prime,err_est,control_cost,inventory_cost,F,M"; }

std::string to_csv_row(const ValuationReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g", r.b, r.x, r.value,
                r.derivative, r.error, r.control_cost, r.inventory_cost, r.F, r.M);
  return buf;
}

}  // namespace levy_replenish
