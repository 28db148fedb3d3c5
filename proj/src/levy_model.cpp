#include "levy_replenish/levy_model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "levy_replenish/errors.hpp"

namespace levy_replenish {

namespace {

using cd = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------------------
// JumpLaw

JumpLaw JumpLaw::hyperexponential(std::vector<double> weights, std::vector<double> rates) {
  JumpLaw law;
  law.form_ = Form::kHyperexponential;
  if (weights.size() != rates.size()) {
    law.weights_ = std::move(weights);
    law.rates_ = std::move(rates);
    return law;
  }
  std::map<double, double> merged;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (weights[i] == 0.0) continue;
    merged[rates[i]] += weights[i];
  }
  for (const auto& [rate, w] : merged) {
    law.rates_.push_back(rate);
    law.weights_.push_back(w);
  }
  return law;
}

JumpLaw JumpLaw::phase_type(Eigen::VectorXd alpha, Eigen::MatrixXd generator) {
  JumpLaw law;
  law.form_ = Form::kPhaseType;
  law.alpha_ = std::move(alpha);
  law.generator_ = std::move(generator);
  return law;
}

int JumpLaw::phases() const {
  switch (form_) {
    case Form::kNone:
      return 0;
    case Form::kHyperexponential:
      return static_cast<int>(rates_.size());
    case Form::kPhaseType:
      return static_cast<int>(alpha_.size());
  }
  return 0;
}

Eigen::VectorXd JumpLaw::exit_vector() const {
  if (form_ != Form::kPhaseType) return {};
  return -generator_.rowwise().sum();
}

std::vector<std::string> JumpLaw::invariant_violations() const {
  std::vector<std::string> out;
  if (form_ == Form::kHyperexponential) {
    if (weights_.size() != rates_.size()) {
      out.push_back("weights and rates have different lengths");
      return out;
    }
    if (weights_.empty()) out.push_back("hyperexponential law has no components");
    double sum = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) out.push_back("weight " + fmt(w) + " is not a nonnegative number");
      sum += w;
    }
    if (!weights_.empty() && std::abs(sum - 1.0) > 1e-12) out.push_back("weights sum to " + fmt(sum) + ", not 1");
    for (double eta : rates_)
      if (!(eta > 0.0) || !std::isfinite(eta)) out.push_back("rate " + fmt(eta) + " is not strictly positive");
  } else if (form_ == Form::kPhaseType) {
    const auto m = alpha_.size();
    if (m == 0) {
      out.push_back("phase-type law has no phases");
      return out;
    }
    if (generator_.rows() != m || generator_.cols() != m) {
      out.push_back("sub-generator T must be square with the size of alpha");
      return out;
    }
    if (!alpha_.allFinite() || !generator_.allFinite()) out.push_back("phase-type parameters must be finite");
    if ((alpha_.array() < 0.0).any()) out.push_back("alpha has negative entries");
    if (std::abs(alpha_.sum() - 1.0) > 1e-12) out.push_back("alpha sums to " + fmt(alpha_.sum()) + ", not 1");
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!(generator_(i, i) < 0.0)) out.push_back("T has a nonnegative diagonal entry");
      for (Eigen::Index j = 0; j < m; ++j)
        if (i != j && generator_(i, j) < 0.0) out.push_back("T has a negative off-diagonal entry");
      if (generator_.row(i).sum() > 1e-12 * std::abs(generator_(i, i))) out.push_back("T has a positive row sum");
    }
    if (out.empty()) {
      Eigen::EigenSolver<Eigen::MatrixXd> es(generator_, false);
      if (es.eigenvalues().real().maxCoeff() >= 0.0) out.push_back("T is not transient (singular sub-generator)");
    }
  }
  return out;
}

cd JumpLaw::transform(cd theta) const {
  switch (form_) {
    case Form::kNone:
      return 1.0;
    case Form::kHyperexponential: {
      cd acc = 0.0;
      for (std::size_t i = 0; i < rates_.size(); ++i) acc += weights_[i] * rates_[i] / (rates_[i] + theta);
      return acc;
    }
    case Form::kPhaseType: {
      const auto m = alpha_.size();
      Eigen::MatrixXcd a = theta * Eigen::MatrixXcd::Identity(m, m) - generator_.cast<cd>();
      Eigen::VectorXcd sol = a.partialPivLu().solve(exit_vector().cast<cd>());
      return alpha_.cast<cd>().dot(sol);
    }
  }
  return 1.0;
}

cd JumpLaw::transform_derivative(cd theta) const {
  switch (form_) {
    case Form::kNone:
      return 0.0;
    case Form::kHyperexponential: {
      cd acc = 0.0;
      for (std::size_t i = 0; i < rates_.size(); ++i) {
        const cd d = rates_[i] + theta;
        acc -= weights_[i] * rates_[i] / (d * d);
      }
      return acc;
    }
    case Form::kPhaseType: {
      const auto m = alpha_.size();
      Eigen::MatrixXcd a = theta * Eigen::MatrixXcd::Identity(m, m) - generator_.cast<cd>();
      auto lu = a.partialPivLu();
      Eigen::VectorXcd sol = lu.solve(lu.solve(exit_vector().cast<cd>()));
      return -alpha_.cast<cd>().dot(sol);
    }
  }
  return 0.0;
}

double JumpLaw::mean() const { return -transform_derivative(0.0).real(); }

double JumpLaw::decay_rate() const {
  switch (form_) {
    case Form::kNone:
      return kInf;
    case Form::kHyperexponential:
      return rates_.empty() ? kInf : *std::min_element(rates_.begin(), rates_.end());
    case Form::kPhaseType: {
      Eigen::EigenSolver<Eigen::MatrixXd> es(generator_, false);
      return -es.eigenvalues().real().maxCoeff();
    }
  }
  return kInf;
}

double JumpLaw::density(double z) const {
  if (z < 0.0) return 0.0;
  switch (form_) {
    case Form::kNone:
      return 0.0;
    case Form::kHyperexponential: {
      double acc = 0.0;
      for (std::size_t i = 0; i < rates_.size(); ++i) acc += weights_[i] * rates_[i] * std::exp(-rates_[i] * z);
      return acc;
    }
    case Form::kPhaseType: {
      Eigen::MatrixXd e = (generator_ * z).exp();
      return alpha_.dot(e * exit_vector());
    }
  }
  return 0.0;
}

Polynomial JumpLaw::denominator() const {
  switch (form_) {
    case Form::kNone:
      return Polynomial::constant(1.0);
    case Form::kHyperexponential: {
      Polynomial d = Polynomial::constant(1.0);
      for (double eta : rates_) d = d * Polynomial{eta, 1.0};
      return d;
    }
    case Form::kPhaseType: {
      // Faddeev-LeVerrier: det(theta I - T) = sum_j c_j theta^j.
      const auto m = alpha_.size();
      std::vector<double> c(static_cast<std::size_t>(m) + 1, 0.0);
      c[static_cast<std::size_t>(m)] = 1.0;
      Eigen::MatrixXd mk = Eigen::MatrixXd::Identity(m, m);
      for (Eigen::Index k = 1; k <= m; ++k) {
        Eigen::MatrixXd am = generator_ * mk;
        const double ck = -am.trace() / static_cast<double>(k);
        c[static_cast<std::size_t>(m - k)] = ck;
        mk = am + ck * Eigen::MatrixXd::Identity(m, m);
      }
      return Polynomial(std::move(c));
    }
  }
  return Polynomial::constant(1.0);
}

Polynomial JumpLaw::numerator() const {
  switch (form_) {
    case Form::kNone:
      return Polynomial::constant(1.0);
    case Form::kHyperexponential: {
      Polynomial n;
      for (std::size_t i = 0; i < rates_.size(); ++i) {
        Polynomial term = Polynomial::constant(weights_[i] * rates_[i]);
        for (std::size_t j = 0; j < rates_.size(); ++j)
          if (j != i) term = term * Polynomial{rates_[j], 1.0};
        n += term;
      }
      return n;
    }
    case Form::kPhaseType: {
      // adj(theta I - T) = sum_{k=1}^{m} M_k theta^{m-k}.
      const auto m = alpha_.size();
      const Eigen::VectorXd t = exit_vector();
      std::vector<double> n(static_cast<std::size_t>(m), 0.0);
      Eigen::MatrixXd mk = Eigen::MatrixXd::Identity(m, m);
      for (Eigen::Index k = 1; k <= m; ++k) {
        n[static_cast<std::size_t>(m - k)] = alpha_.dot(mk * t);
        Eigen::MatrixXd am = generator_ * mk;
        const double ck = -am.trace() / static_cast<double>(k);
        mk = am + ck * Eigen::MatrixXd::Identity(m, m);
      }
      return Polynomial(std::move(n));
    }
  }
  return Polynomial::constant(1.0);
}

// ---------------------------------------------------------------------------------------
// Laplace exponent

bool bounded_variation(const LevyModel& model) { return model.sigma == 0.0; }

double laplace_exponent(const LevyModel& model, double theta) {
  if (theta == 0.0) return 0.0;
  double jump = 0.0;
  if (model.lambda > 0.0) {
    if (theta <= -model.jumps.decay_rate())
      throw DomainError("laplace_exponent: jump transform diverges at theta = " + fmt(theta));
    jump = model.lambda * (model.jumps.transform(theta).real() - 1.0);
  }
  return 0.5 * model.sigma * model.sigma * theta * theta + model.mu * theta + jump;
}

cd laplace_exponent(const LevyModel& model, cd theta) {
  cd jump = 0.0;
  if (model.lambda > 0.0) jump = model.lambda * (model.jumps.transform(theta) - 1.0);
  return 0.5 * model.sigma * model.sigma * theta * theta + model.mu * theta + jump;
}

double kappa_prime(const LevyModel& model, double theta) {
  double jump = 0.0;
  if (model.lambda > 0.0) {
    if (theta <= -model.jumps.decay_rate())
      throw DomainError("kappa_prime: jump transform diverges at theta = " + fmt(theta));
    jump = model.lambda * model.jumps.transform_derivative(theta).real();
  }
  return model.sigma * model.sigma * theta + model.mu + jump;
}

cd kappa_prime(const LevyModel& model, cd theta) {
  cd jump = 0.0;
  if (model.lambda > 0.0) jump = model.lambda * model.jumps.transform_derivative(theta);
  return model.sigma * model.sigma * theta + model.mu + jump;
}

double phi(const LevyModel& model, double rate) {
  if (!(rate > 0.0)) throw DomainError("phi: rate must be positive");
  double lo = 0.0;
  double hi = 1.0;
  while (laplace_exponent(model, hi) <= rate) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("phi: could not bracket the root");
  }
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (laplace_exponent(model, mid) > rate)
      hi = mid;
    else
      lo = mid;
  }
  // Newton polish within the final bracket.
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 3; ++it) {
    const double d = kappa_prime(model, x);
    if (!(d > 0.0)) break;
    const double next = x - (laplace_exponent(model, x) - rate) / d;
    if (!(next >= lo && next <= hi)) break;
    x = next;
  }
  return x;
}

// ---------------------------------------------------------------------------------------
// PiecewisePolynomial

PiecewisePolynomial::PiecewisePolynomial(std::vector<double> breakpoints, std::vector<Polynomial> pieces)
    : breakpoints_(std::move(breakpoints)), pieces_(std::move(pieces)) {
  if (pieces_.size() != breakpoints_.size() + 1)
    throw std::invalid_argument("PiecewisePolynomial: need one more piece than breakpoints");
  if (!std::is_sorted(breakpoints_.begin(), breakpoints_.end()))
    throw std::invalid_argument("PiecewisePolynomial: breakpoints must be sorted");
  init();
}

void PiecewisePolynomial::init() {
  derivs_.clear();
  for (const auto& p : pieces_) {
    std::vector<Polynomial> chain;
    Polynomial d = p;
    while (!d.is_zero()) {
      chain.push_back(d);
      d = d.derivative();
    }
    derivs_.push_back(std::move(chain));
  }
}

PiecewisePolynomial PiecewisePolynomial::indicator(double lo, double hi) {
  return PiecewisePolynomial({lo, hi}, {Polynomial{}, Polynomial::constant(1.0), Polynomial{}});
}

std::size_t PiecewisePolynomial::piece_index(double x) const {
  return static_cast<std::size_t>(std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
                                  breakpoints_.begin());
}

double PiecewisePolynomial::operator()(double x) const {
  if (x == kInf || x == -kInf) {
    const Polynomial& p = x > 0 ? pieces_.back() : pieces_.front();
    if (p.degree() <= 0) return p.coefficient(0);
    const double sign = (x < 0 && p.degree() % 2 == 1) ? -1.0 : 1.0;
    return sign * std::copysign(kInf, p.leading());
  }
  return pieces_[piece_index(x)](x);
}

double PiecewisePolynomial::derivative(double x, Side side) const {
  std::size_t i = piece_index(x);
  if (side == Side::kLeft && i > 0 && breakpoints_[i - 1] == x) --i;
  return pieces_[i].derivative()(x);
}

PiecewisePolynomial PiecewisePolynomial::derivative() const {
  std::vector<Polynomial> d;
  d.reserve(pieces_.size());
  for (const auto& p : pieces_) d.push_back(p.derivative());
  return PiecewisePolynomial(breakpoints_, std::move(d));
}

int PiecewisePolynomial::degree() const {
  int d = -1;
  for (const auto& p : pieces_) d = std::max(d, p.degree());
  return d;
}

double PiecewisePolynomial::limit_slope(int direction) const {
  const Polynomial d = (direction > 0 ? pieces_.back() : pieces_.front()).derivative();
  if (d.degree() <= 0) return d.coefficient(0);
  const double sign = (direction < 0 && d.degree() % 2 == 1) ? -1.0 : 1.0;
  return sign * std::copysign(kInf, d.leading());
}

namespace {

// G(y) = sum_n P^{(n)}(y) / decay^{n+1}, so that d/dy[-e^{-decay y} G(y)] = P(y) e^{-decay y}.
double exp_antiderivative_factor(const Polynomial& p, double y, double decay) {
  double acc = 0.0;
  double scale = 1.0 / decay;
  Polynomial d = p;
  while (!d.is_zero()) {
    acc += d(y) * scale;
    scale /= decay;
    d = d.derivative();
  }
  return acc;
}

}  // namespace

double PiecewisePolynomial::exp_tail_integral(double a, double decay) const {
  if (!(decay > 0.0)) throw DomainError("exp_tail_integral: decay must be positive");
  double total = 0.0;
  for (std::size_t i = piece_index(a); i < pieces_.size(); ++i) {
    const double s = std::max(a, i == 0 ? -kInf : breakpoints_[i - 1]);
    const double t = i < breakpoints_.size() ? breakpoints_[i] : kInf;
    if (t <= s) continue;
    const Polynomial& p = pieces_[i];
    double part = std::exp(-decay * (s - a)) * exp_antiderivative_factor(p, s, decay);
    if (t != kInf) part -= std::exp(-decay * (t - a)) * exp_antiderivative_factor(p, t, decay);
    total += part;
  }
  return total;
}

double PiecewisePolynomial::segment(std::size_t piece, double ua, double slope, double s0, double len,
                                    double rate) const {
  const auto& chain = derivs_[piece];
  if (chain.empty() || !(len > 0.0)) return 0.0;
  const double disc = s0 == 0.0 ? 1.0 : std::exp(-rate * s0);
  if (rate * len <= 0.5 && chain.size() <= 8) {
    // int_0^len e^{-rate s} s^n / n! ds = len^{n+1} / n! * sum_k (-rate len)^k / (k! (n + k + 1))
    static const std::array<double, 96> inv = [] {
      std::array<double, 96> a{};
      for (std::size_t i = 1; i < a.size(); ++i) a[i] = 1.0 / static_cast<double>(i);
      return a;
    }();
    const double x = rate * len;
    const std::size_t deg = std::min<std::size_t>(chain.size(), 8);
    std::array<double, 8> sums{};
    double term = 1.0;
    for (std::size_t k = 0; k < 40; ++k) {
      for (std::size_t n = 0; n < deg; ++n) sums[n] += term * inv[n + k + 1];
      if (std::abs(term) * inv[k + 1] <= 1e-17 * std::abs(sums[0])) break;
      term *= -x * inv[k + 1];
    }
    double total = 0.0;
    double coef = len;
    for (std::size_t n = 0; n < chain.size(); ++n) {
      const double sum = n < deg ? sums[n] : 0.0;
      total += chain[n](ua) * coef * sum;
      coef *= slope * len * inv[std::min(n + 1, inv.size() - 1)];
    }
    return disc * total;
  }
  // G(s) = sum_n slope^n P^{(n)}(ua + slope s) / rate^{n+1}; integral = G(0) - e^{-rate len} G(len).
  const double ub = ua + slope * len;
  double g0 = 0.0;
  double g1 = 0.0;
  double scale = 1.0 / rate;
  for (const auto& d : chain) {
    g0 += scale * d(ua);
    g1 += scale * d(ub);
    scale *= slope / rate;
  }
  return disc * (g0 - std::exp(-rate * len) * g1);
}

double PiecewisePolynomial::discounted_linear_integral(double u0, double slope, double len, double rate) const {
  if (!(len > 0.0)) return 0.0;
  const double u_end = u0 + slope * len;
  double total = 0.0;
  double s = 0.0;
  if (slope > 0.0) {
    std::size_t i = piece_index(u0);
    while (i < breakpoints_.size() && breakpoints_[i] < u_end) {
      const double t = (breakpoints_[i] - u0) / slope;
      total += segment(i, u0 + slope * s, slope, s, t - s, rate);
      s = t;
      ++i;
    }
    return total + segment(i, u0 + slope * s, slope, s, len - s, rate);
  }
  if (slope < 0.0) {
    auto i = static_cast<std::size_t>(std::lower_bound(breakpoints_.begin(), breakpoints_.end(), u0) -
                                      breakpoints_.begin());
    while (i > 0 && breakpoints_[i - 1] > u_end) {
      const double t = (breakpoints_[i - 1] - u0) / slope;
      total += segment(i, u0 + slope * s, slope, s, t - s, rate);
      s = t;
      --i;
    }
    return total + segment(i, u0 + slope * s, slope, s, len - s, rate);
  }
  return segment(piece_index(u0), u0, 0.0, 0.0, len, rate);
}

// ---------------------------------------------------------------------------------------
// CostModel

std::string_view cost_kind_name(CostKind kind) {
  switch (kind) {
    case CostKind::kQuadratic:
      return "quadratic";
    case CostKind::kPiecewiseLinear:
      return "piecewise_linear";
    case CostKind::kPolynomial:
      return "polynomial";
  }
  return "unknown";
}

CostModel CostModel::quadratic() {
  CostModel c;
  c.kind = CostKind::kQuadratic;
  c.f = PiecewisePolynomial(Polynomial{0.0, 0.0, 1.0});
  return c;
}

CostModel CostModel::piecewise_linear(double holding, double shortage) {
  CostModel c;
  c.kind = CostKind::kPiecewiseLinear;
  c.holding = holding;
  c.shortage = shortage;
  c.f = PiecewisePolynomial({0.0}, {Polynomial{0.0, -shortage}, Polynomial{0.0, holding}});
  return c;
}

CostModel CostModel::polynomial(std::vector<double> ascending) {
  CostModel c;
  c.kind = CostKind::kPolynomial;
  c.coefficients = ascending;
  c.f = PiecewisePolynomial(Polynomial(std::move(ascending)));
  return c;
}

// ---------------------------------------------------------------------------------------
// Validation

std::string_view assumption_name(Assumption a) {
  switch (a) {
    case Assumption::kPositiveRates:
      return "positive rates: q > 0, r > 0, finite parameters";
    case Assumption::kJumpLaw:
      return "jump law: well-formed hyperexponential or phase-type law";
    case Assumption::kNonMonotonePath:
      return "non-monotone paths: X is neither a pure drift nor the negative of a subordinator";
    case Assumption::kExponentialMoment:
      return "exponential moment: E[exp(theta J)] finite for some theta > 0";
    case Assumption::kCostConvexity:
      return "cost convexity: f convex";
    case Assumption::kCostSlope:
      return "cost slope: f'(-inf) < -C*q < f'(+inf)";
  }
  return "unknown";
}

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::invalid_argument([&] {
        std::string msg = "invalid problem specification:";
        for (const auto& i : issues) msg += "\n  [" + std::string(assumption_name(i.assumption)) + "] " + i.message;
        return msg;
      }()),
      issues_(std::move(issues)) {}

namespace {

bool finite(double v) { return std::isfinite(v); }

void check_convexity(const CostModel& cost, std::vector<ValidationIssue>& out) {
  if (cost.kind == CostKind::kPiecewiseLinear) {
    if (!(cost.holding + cost.shortage >= 0.0))
      out.push_back({Assumption::kCostConvexity, "piecewise-linear cost needs h + p >= 0"});
    return;
  }
  for (const auto& piece : cost.f.pieces()) {
    const Polynomial f2 = piece.derivative().derivative();
    if (f2.degree() <= 0) {
      if (f2.coefficient(0) < 0.0) out.push_back({Assumption::kCostConvexity, "f'' is a negative constant"});
      continue;
    }
    std::vector<double> pts;
    for (const auto& z : polynomial_roots(f2))
      if (std::abs(z.imag()) <= 1e-9 * (1.0 + std::abs(z))) pts.push_back(z.real());
    std::sort(pts.begin(), pts.end());
    std::vector<double> probes;
    if (pts.empty()) {
      probes.push_back(0.0);
    } else {
      probes.push_back(pts.front() - 1.0);
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) probes.push_back(0.5 * (pts[i] + pts[i + 1]));
      probes.push_back(pts.back() + 1.0);
    }
    double scale = 0.0;
    for (double c : f2.coefficients()) scale = std::max(scale, std::abs(c));
    for (double x : probes) {
      if (f2(x) < -1e-12 * scale) {
        out.push_back({Assumption::kCostConvexity, "f'' < 0 near x = " + fmt(x)});
        break;
      }
    }
  }
}

}  // namespace

std::vector<ValidationIssue> check_assumptions(const ProblemSpec& spec) {
  std::vector<ValidationIssue> out;
  const LevyModel& m = spec.model;

  if (!(spec.q > 0.0) || !finite(spec.q)) out.push_back({Assumption::kPositiveRates, "q = " + fmt(spec.q) + " must be positive"});
  if (!(spec.r > 0.0) || !finite(spec.r)) out.push_back({Assumption::kPositiveRates, "r = " + fmt(spec.r) + " must be positive"});
  if (!finite(spec.C)) out.push_back({Assumption::kPositiveRates, "C must be finite"});
  if (!finite(m.mu)) out.push_back({Assumption::kPositiveRates, "mu must be finite"});
  if (!(m.sigma >= 0.0) || !finite(m.sigma)) out.push_back({Assumption::kPositiveRates, "sigma must be nonnegative"});
  if (!(m.lambda >= 0.0) || !finite(m.lambda)) out.push_back({Assumption::kPositiveRates, "lambda must be nonnegative"});

  bool law_ok = true;
  if (m.lambda > 0.0 && m.jumps.form() == JumpLaw::Form::kNone) {
    out.push_back({Assumption::kJumpLaw, "lambda > 0 requires a jump law"});
    law_ok = false;
  }
  for (auto& msg : m.jumps.invariant_violations()) {
    out.push_back({Assumption::kJumpLaw, msg});
    law_ok = false;
  }

  if (m.sigma == 0.0) {
    if (m.lambda == 0.0 && !m.allow_degenerate)
      out.push_back({Assumption::kNonMonotonePath, "sigma = 0 and lambda = 0 give a deterministic drift"});
    if (!(m.mu > 0.0))
      out.push_back({Assumption::kNonMonotonePath,
                     "sigma = 0 requires mu > 0; otherwise X is the negative of a subordinator"});
  }

  if (law_ok && m.lambda > 0.0) {
    const double eta = m.jumps.decay_rate();
    if (!(eta > 0.0)) out.push_back({Assumption::kExponentialMoment, "jump law has no exponential moment"});
  }

  check_convexity(spec.cost, out);

  const double lo = spec.cost.f.limit_slope(-1);
  const double hi = spec.cost.f.limit_slope(+1);
  const double target = -spec.C * spec.q;
  if (!(lo < target && target < hi))
    out.push_back({Assumption::kCostSlope, "f'(-inf) = " + fmt(lo) + ", -C*q = " + fmt(target) + ", f'(+inf) = " + fmt(hi)});
  return out;
}

ValidatedSpec::ValidatedSpec(ProblemSpec spec) : spec_(std::move(spec)) {
  phi_q_ = phi(spec_.model, spec_.q);
  phi_qr_ = phi(spec_.model, spec_.q + spec_.r);
  mean_drift_ = kappa_prime(spec_.model, 0.0);
}

ValidatedSpec validate(ProblemSpec spec) {
  auto issues = check_assumptions(spec);
  if (!issues.empty()) throw ValidationError(std::move(issues));
  return ValidatedSpec(std::move(spec));
}

ValidatedSpec ValidatedSpec::with_C(double C) const {
  ProblemSpec s = spec_;
  s.C = C;
  return validate(std::move(s));
}

ValidatedSpec ValidatedSpec::with_r(double r) const {
  ProblemSpec s = spec_;
  s.r = r;
  return validate(std::move(s));
}

}  // namespace levy_replenish
