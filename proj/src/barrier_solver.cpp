#include "levy_replenish/barrier_solver.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>
#include <thread>

#include "levy_replenish/errors.hpp"

namespace levy_replenish {

namespace {

struct Root {
  double x;
  double lo;
  double hi;
  int iterations;
};

template <class G>
Root bracket_and_solve(G&& g) {
  double lo = -1.0;
  double hi = 1.0;
  double glo = g(lo);
  double ghi = g(hi);
  int evals = 2;
  while (glo > 0.0 || ghi < 0.0) {
    if (glo > 0.0) {
      hi = lo;
      ghi = glo;
      lo *= 2.0;
      glo = g(lo);
    } else {
      lo = hi;
      glo = ghi;
      hi *= 2.0;
      ghi = g(hi);
    }
    ++evals;
    if (std::max(-lo, hi) > 1e6)
      throw NumericalError("no sign change of the barrier equation within |b| <= 1e6");
  }
  if (glo == 0.0) return {lo, lo, lo, evals};
  if (ghi == 0.0) return {hi, hi, hi, evals};
  const double blo = lo;
  const double bhi = hi;
  std::uintmax_t max_iter = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a)); };
  auto [a, b] = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi, tol, max_iter);
  const double ga = g(a);
  const double gb = g(b);
  const double x = std::abs(ga) <= std::abs(gb) ? a : b;
  return {x, blo, bhi, evals + static_cast<int>(max_iter) + 2};
}

}  // namespace

nlohmann::json to_json(const SolveResult& s) {
  nlohmann::json j = {{"b_star", s.b_star},
                      {"residual", s.residual},
                      {"bracket", {s.bracket_lo, s.bracket_hi}},
                      {"iterations", s.iterations},
                      {"closed_form_available", s.closed_form_available}};
  if (s.closed_form_available) {
    j["closed_form"] = s.closed_form;
    j["closed_form_difference"] = s.b_star - s.closed_form;
  }
  return j;
}

SolveResult solve_bstar(const Valuator& valuator) {
  const Root root = bracket_and_solve([&](double b) { return valuator.m_func(b); });
  SolveResult out;
  out.b_star = root.x;
  out.residual = std::abs(valuator.m_func(root.x));
  out.bracket_lo = root.lo;
  out.bracket_hi = root.hi;
  out.iterations = root.iterations;
  if (valuator.spec().cost().kind == CostKind::kQuadratic) {
    out.closed_form_available = true;
    out.closed_form = bstar_quadratic_closed_form(valuator.spec());
  }
  return out;
}

double bstar_quadratic_closed_form(const ValidatedSpec& spec) {
  if (spec.cost().kind != CostKind::kQuadratic)
    throw std::invalid_argument("closed-form barrier is only available for the quadratic cost");
  return 1.0 / spec.phi_qr() - 1.0 / spec.phi_q() - spec.mean_drift() / (spec.q() + spec.r()) -
         spec.q() * spec.C() / 2.0;
}

double classical_m(const ValidatedSpec& spec, double b) {
  const double pq = spec.phi_q();
  const PiecewisePolynomial& f = spec.cost().f;
  return pq * f.exp_tail_integral(b, pq) + spec.C() * spec.q() / pq - f(b);
}

double classical_bstar(const ValidatedSpec& spec) {
  return bracket_and_solve([&](double b) { return classical_m(spec, b); }).x;
}

SweepParam parse_sweep_param(const std::string& name) {
  if (name == "C") return SweepParam::kC;
  if (name == "r") return SweepParam::kR;
  if (name == "b") return SweepParam::kB;
  throw std::invalid_argument("unknown sweep parameter \"" + name + "\" (expected C, r or b)");
}

std::string sweep_param_name(SweepParam p) {
  switch (p) {
    case SweepParam::kC:
      return "C";
    case SweepParam::kR:
      return "r";
    case SweepParam::kB:
      return "b";
  }
  return "?";
}

namespace {

SweepRow run_row(const ValidatedSpec& base, SweepParam param, double value, const std::vector<double>& xs,
                 const QuadratureConfig& cfg) {
  SweepRow row;
  row.param_value = value;
  try {
    ValidatedSpec spec = param == SweepParam::kC ? base.with_C(value) : param == SweepParam::kR ? base.with_r(value) : base;
    Valuator val(spec, cfg);
    if (param == SweepParam::kB) {
      row.b = value;
    } else {
      row.b = solve_bstar(val).b_star;
    }
    const BarrierTerms t = val.barrier_terms(row.b);
    row.residual = std::abs(t.M);
    for (double x : xs) row.values.push_back(val.value(t, x));
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

SweepResult sweep(const ValidatedSpec& spec, SweepParam param, const std::vector<double>& values,
                  const std::vector<double>& x_grid, const QuadratureConfig& cfg) {
  SweepResult out;
  out.param = param;
  out.x_grid = x_grid;
  out.rows.resize(values.size());

  const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                           static_cast<unsigned>(values.size())));
  std::vector<std::future<void>> pool;
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < values.size(); i = next++)
        out.rows[i] = run_row(spec, param, values[i], x_grid, cfg);
    }));
  }
  for (auto& f : pool) f.get();

  // Monotonicity observations over successful rows ordered by parameter value.
  std::vector<const SweepRow*> ok;
  for (const auto& r : out.rows)
    if (r.ok) ok.push_back(&r);
  std::sort(ok.begin(), ok.end(), [](const SweepRow* a, const SweepRow* b) { return a->param_value < b->param_value; });

  if (param == SweepParam::kB) {
    Valuator val(spec, cfg);
    out.b_star = solve_bstar(val).b_star;
    const BarrierTerms t = val.barrier_terms(out.b_star);
    bool minimal = true;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const double vstar = val.value(t, x_grid[i]);
      for (const SweepRow* r : ok)
        if (vstar > r->values[i] + 1e-7) minimal = false;
    }
    out.minimum_at_bstar = minimal;
    return out;
  }

  bool decreasing = true;
  bool monotone = true;
  for (std::size_t k = 1; k < ok.size(); ++k) {
    if (!(ok[k]->b < ok[k - 1]->b)) decreasing = false;
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
      const double prev = ok[k - 1]->values[i];
      const double cur = ok[k]->values[i];
      const double slack = 1e-9 * std::max(1.0, std::abs(prev));
      if (param == SweepParam::kC && cur < prev - slack) monotone = false;
      if (param == SweepParam::kR && cur > prev + slack) monotone = false;
    }
  }
  out.b_decreasing = decreasing;
  out.value_monotone = monotone;
  return out;
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  os << "param_name,param_value,b_star,residual";
  char buf[64];
  for (double x : s.x_grid) {
    std::snprintf(buf, sizeof buf, ",v(%.17g)", x);
    os << buf;
  }
  os << ",status\n";
  for (const auto& r : s.rows) {
    std::snprintf(buf, sizeof buf, "%.17g", r.param_value);
    os << sweep_param_name(s.param) << ',' << buf;
    if (r.ok) {
      std::snprintf(buf, sizeof buf, ",%.17g", r.b);
      os << buf;
      std::snprintf(buf, sizeof buf, ",%.17g", r.residual);
      os << buf;
      for (double v : r.values) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        os << buf;
      }
      os << ",ok\n";
    } else {
      os << ",,";
      for (std::size_t i = 0; i < s.x_grid.size(); ++i) os << ',';
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '"', '\'');
      os << ",\"error: " << msg << "\"\n";
    }
  }
  return os.str();
}

}  // namespace levy_replenish
