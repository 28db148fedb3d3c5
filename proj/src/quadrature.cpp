#include "levy_replenish/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "levy_replenish/errors.hpp"

namespace levy_replenish {

namespace {

struct Panel {
  double value;
  double error;
  double l1;
};

Panel gk_panel(const Integrand& f, double a, double b, const QuadratureConfig& cfg) {
  double err = 0.0;
  double l1 = 0.0;
  const double width = b - a;
  auto unit = [&](double t) { return width * f(a + width * t); };
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(unit, 0.0, 1.0, cfg.max_depth,
                                                                                cfg.rtol, &err, &l1);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "quadrature produced a non-finite value on [" << a << ", " << b << "]";
    throw NumericalError(os.str());
  }
  if (err > std::max(cfg.atol, cfg.rtol * l1) * 1e3) {
    std::ostringstream os;
    os.precision(6);
    os << "quadrature did not converge on [" << a << ", " << b << "]: error estimate " << err << ", L1 " << l1;
    throw NumericalError(os.str());
  }
  return {v, err, l1};
}

/// Interior break points, dropping those that would create slivers narrower than `gap`.
std::vector<double> interior(const std::vector<double>& breaks, double a, double b) {
  const double gap = 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  std::vector<double> pts;
  for (double x : breaks)
    if (x > a + gap && x < b - gap) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double x : pts)
    if (out.empty() || x - out.back() > gap) out.push_back(x);
  return out;
}

Panel split_panel(const Integrand& f, double a, double b, const std::vector<double>& breaks,
                  const QuadratureConfig& cfg) {
  Panel total{0.0, 0.0, 0.0};
  double lo = a;
  auto pts = interior(breaks, a, b);
  pts.push_back(b);
  for (double hi : pts) {
    if (hi > lo) {
      const Panel p = gk_panel(f, lo, hi, cfg);
      total.value += p.value;
      total.error += p.error;
      total.l1 += p.l1;
    }
    lo = hi;
  }
  return total;
}

}  // namespace

QuadResult integrate(const Integrand& f, double a, double b, const std::vector<double>& breaks,
                     const QuadratureConfig& cfg) {
  if (a == b) return {};
  if (a > b) {
    QuadResult r = integrate(f, b, a, breaks, cfg);
    r.value = -r.value;
    return r;
  }
  const Panel p = split_panel(f, a, b, breaks, cfg);
  return {p.value, p.error};
}

QuadResult integrate_lower_tail(const Integrand& f, double b, double decay, const std::vector<double>& breaks,
                                const QuadratureConfig& cfg) {
  const double width = std::isfinite(decay) && decay > 0.0 ? std::min(4.0 / decay, 50.0) : 4.0;
  QuadResult total;
  int quiet = 0;
  double hi = b;
  for (int k = 0; k < cfg.max_panels; ++k) {
    const double lo = hi - width;
    const Panel p = split_panel(f, lo, hi, breaks, cfg);
    total.value += p.value;
    total.error += p.error;
    hi = lo;
    const double tol = std::max(cfg.atol, cfg.rtol * std::abs(total.value)) * 1e-2;
    quiet = p.l1 <= tol ? quiet + 1 : 0;
    if (quiet >= 2) {
      total.error += p.l1;
      return total;
    }
  }
  std::ostringstream os;
  os << "semi-infinite quadrature below " << b << " did not decay within " << cfg.max_panels << " panels";
  throw NumericalError(os.str());
}

}  // namespace levy_replenish
