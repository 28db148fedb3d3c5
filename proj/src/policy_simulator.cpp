#include "levy_replenish/policy_simulator.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "levy_replenish/errors.hpp"

namespace levy_replenish {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kBlock = 1024;
constexpr std::size_t kPilotPaths = 1000;

class Uniforms {
 public:
  Uniforms(std::uint64_t seed, bool mirrored) : gen_(seed), mirrored_(mirrored) {}

  /// Uniform on the open interval (0, 1).
  double operator()() {
    const double u = (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
    return mirrored_ ? 1.0 - u : u;
  }
  double exponential() { return -std::log((*this)()); }
  double normal() { return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * (*this)()); }

 private:
  std::mt19937_64 gen_;
  bool mirrored_;
};

class JumpSampler {
 public:
  explicit JumpSampler(const JumpLaw& law) : form_(law.form()) {
    if (form_ == JumpLaw::Form::kHyperexponential) {
      double acc = 0.0;
      for (std::size_t i = 0; i < law.weights().size(); ++i) {
        acc += law.weights()[i];
        cum_.push_back(acc);
        rates_.push_back(law.rates()[i]);
      }
    } else if (form_ == JumpLaw::Form::kPhaseType) {
      const Eigen::MatrixXd& T = law.generator();
      const Eigen::VectorXd t = law.exit_vector();
      const auto n = T.rows();
      double acc = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += law.alpha()(i);
        cum_.push_back(acc);
      }
      for (Eigen::Index i = 0; i < n; ++i) {
        const double out = -T(i, i);
        rates_.push_back(out);
        std::vector<double> row;
        double a = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (j != i) a += T(i, j) / out;
          row.push_back(a);
        }
        a += t(i) / out;
        row.push_back(a);  // exit
        moves_.push_back(std::move(row));
      }
    }
  }

  double operator()(Uniforms& uni) const {
    if (form_ == JumpLaw::Form::kHyperexponential) {
      const double u = uni() * cum_.back();
      std::size_t i = 0;
      while (i + 1 < cum_.size() && u >= cum_[i]) ++i;
      return uni.exponential() / rates_[i];
    }
    if (form_ == JumpLaw::Form::kPhaseType) {
      const double u = uni();
      std::size_t i = 0;
      while (i < cum_.size() && u >= cum_[i]) ++i;
      if (i == cum_.size()) return 0.0;  // defective initial law: atom at zero
      double size = 0.0;
      for (;;) {
        size += uni.exponential() / rates_[i];
        const std::vector<double>& row = moves_[i];
        const double v = uni() * row.back();
        std::size_t j = 0;
        while (j + 1 < row.size() && v >= row[j]) ++j;
        if (j + 1 == row.size()) return size;
        i = j;
      }
    }
    return 0.0;
  }

 private:
  JumpLaw::Form form_;
  std::vector<double> cum_;
  std::vector<double> rates_;
  std::vector<std::vector<double>> moves_;
};

double second_moment(const JumpLaw& law) {
  if (law.form() == JumpLaw::Form::kHyperexponential) {
    double m = 0.0;
    for (std::size_t i = 0; i < law.weights().size(); ++i) m += 2.0 * law.weights()[i] / (law.rates()[i] * law.rates()[i]);
    return m;
  }
  if (law.form() == JumpLaw::Form::kPhaseType) {
    const Eigen::MatrixXd inv = law.generator().inverse();
    return 2.0 * law.alpha().dot(inv * inv * Eigen::VectorXd::Ones(law.generator().rows()));
  }
  return 0.0;
}

/// Running mean and centered second moment for K quantities (Welford, merged by Chan).
template <std::size_t K>
struct Moments {
  double n = 0.0;
  std::array<double, K> mean{};
  std::array<double, K> m2{};

  void add(const std::array<double, K>& x) {
    n += 1.0;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = x[k] - mean[k];
      mean[k] += d / n;
      m2[k] += d * (x[k] - mean[k]);
    }
  }
  void merge(const Moments& o) {
    if (o.n == 0.0) return;
    const double n2 = n + o.n;
    for (std::size_t k = 0; k < K; ++k) {
      const double d = o.mean[k] - mean[k];
      mean[k] += d * o.n / n2;
      m2[k] += o.m2[k] + d * d * n * o.n / n2;
    }
    n = n2;
  }
  double se(std::size_t k) const { return n > 1.0 ? std::sqrt(m2[k] / (n - 1.0) / n) : 0.0; }
};

/// Evaluates fn(i) for i in [0, samples) in fixed blocks and merges them in block order, so the
/// result does not depend on the number of workers.
template <std::size_t K, class Fn>
Moments<K> run_blocks(std::size_t samples, unsigned threads, Fn&& fn) {
  const std::size_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<Moments<K>> partial(blocks);
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(blocks, 1)));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t blk = next++; blk < blocks; blk = next++) {
      const std::size_t end = std::min(samples, (blk + 1) * kBlock);
      for (std::size_t i = blk * kBlock; i < end; ++i) partial[blk].add(fn(i));
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::future<void>> pool;
    for (unsigned w = 0; w < workers; ++w) pool.push_back(std::async(std::launch::async, work));
    for (auto& f : pool) f.get();
  }
  Moments<K> total;
  for (const auto& p : partial) total.merge(p);
  return total;
}

struct PolicyContext {
  const ValidatedSpec* spec;
  const PiecewisePolynomial* f;
  std::optional<PiecewisePolynomial> occupation;
  JumpSampler sampler;
  double b;
  double x0;
  double horizon;
  double dt;
  bool ticks;
  bool exact;
};

PolicyContext make_context(const ValidatedSpec& spec, double b, double x0, const SimConfig& cfg, double horizon) {
  if (!(cfg.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(horizon >= 0.0)) throw std::invalid_argument("horizon must be non-negative");
  PolicyContext c{&spec,
                  &spec.cost().f,
                  std::nullopt,
                  JumpSampler(spec.model().jumps),
                  b,
                  x0,
                  horizon,
                  cfg.dt,
                  spec.model().sigma > 0.0 || cfg.integration == CostIntegration::kLeftEndpoint,
                  cfg.integration == CostIntegration::kExactSegments};
  if (cfg.occupation) c.occupation = PiecewisePolynomial::indicator(cfg.occupation->first, cfg.occupation->second);
  return c;
}

PathResult run_policy_path(const PolicyContext& c, Uniforms& uni, std::vector<TraceEvent>* trace,
                           std::size_t path) {
  const LevyModel& m = c.spec->model();
  const double q = c.spec->q();
  const double r = c.spec->r();
  const double total_rate = m.lambda + r;
  const double T = c.horizon;
  const PiecewisePolynomial& f = *c.f;
  const bool track_dt = !c.exact || m.sigma > 0.0;

  PathResult res;
  double t = 0.0;
  double u = c.x0;
  double next_event = total_rate > 0.0 ? uni.exponential() / total_rate : kInf;
  std::size_t tick = 1;
  double next_tick = c.ticks ? c.dt : kInf;
  if (trace) trace->push_back({path, t, u, "start"});

  while (t < T) {
    const double t1 = std::min({next_event, next_tick, T});
    const double h = t1 - t;
    if (h > 0.0) {
      double u1 = u + m.mu * h;
      if (m.sigma > 0.0) u1 += m.sigma * std::sqrt(h) * uni.normal();
      const double disc = std::exp(-q * t);
      const double slope = (u1 - u) / h;
      const double g0 = track_dt ? f(u) : 0.0;
      if (c.exact)
        res.inventory_cost += disc * f.discounted_linear_integral(u, slope, h, q);
      else
        res.inventory_cost += disc * g0 * h;
      if (c.occupation) res.occupation += disc * c.occupation->discounted_linear_integral(u, slope, h, q);
      if (track_dt) res.dt_error += h * std::abs(std::exp(-q * t1) * f(u1) - disc * g0);
      u = u1;
    }
    t = t1;
    if (t >= T) break;
    if (next_tick <= next_event) {
      next_tick = static_cast<double>(++tick) * c.dt;
      continue;
    }
    if (uni() * total_rate < m.lambda) {
      u -= c.sampler(uni);
      if (trace) trace->push_back({path, t, u, "jump"});
    } else if (u < c.b) {
      res.replenishment += std::exp(-q * t) * (c.b - u);
      ++res.replenishment_count;
      u = c.b;
      if (trace) trace->push_back({path, t, u, "replenish"});
    } else if (trace) {
      trace->push_back({path, t, u, "observe"});
    }
    next_event = t + uni.exponential() / total_rate;
  }
  if (trace) trace->push_back({path, T, u, "end"});
  return res;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double cost_scale(const ValidatedSpec& spec, double b, double x0) {
  const LevyModel& m = spec.model();
  const double var = m.sigma * m.sigma + m.lambda * second_moment(m.jumps);
  const double R = std::max(std::abs(x0), std::abs(b)) + std::sqrt(var / spec.q());
  const PiecewisePolynomial& f = spec.cost().f;
  return std::max({std::abs(f(R)), std::abs(f(-R)), std::abs(f(b)), 1.0}) / spec.q();
}

std::size_t samples_for(const SimConfig& cfg) {
  if (cfg.antithetic && cfg.paths % 2 != 0) throw std::invalid_argument("antithetic sampling needs an even path count");
  return cfg.antithetic ? cfg.paths / 2 : cfg.paths;
}

}  // namespace

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

PathResult simulate_path(const ValidatedSpec& spec, double b, double x0, const SimConfig& config, double horizon,
                         std::uint64_t seed, bool mirrored, std::vector<TraceEvent>* trace, std::size_t path_index) {
  const PolicyContext c = make_context(spec, b, x0, config, horizon);
  Uniforms uni(seed, mirrored);
  return run_policy_path(c, uni, trace, path_index);
}

double truncation_bound(const ValidatedSpec& spec, double b, double x0, double horizon) {
  const LevyModel& m = spec.model();
  const double q = spec.q();
  const double var = m.sigma * m.sigma + m.lambda * second_moment(m.jumps);
  const double drift = std::abs(spec.mean_drift());
  const double R = std::max(std::abs(x0), std::abs(b)) + drift * horizon + 3.0 * std::sqrt(var * (horizon + 1.0 / q));
  const PiecewisePolynomial& f = spec.cost().f;
  const double env = std::max({std::abs(f(R)), std::abs(f(-R)), std::abs(f(b))});
  const double demand = std::abs(m.mu) + m.lambda * m.jumps.mean();
  return std::exp(-q * horizon) * (env / q + std::abs(spec.C()) * (R + std::abs(b) + demand / q));
}

double choose_horizon(const ValidatedSpec& spec, double b, double x0, double target_se) {
  if (!(target_se > 0.0)) target_se = 1e-4 * cost_scale(spec, b, x0);
  const double goal = 0.1 * target_se;
  double hi = 1.0 / spec.q();
  while (truncation_bound(spec, b, x0, hi) > goal) {
    hi *= 2.0;
    if (hi > 1e9) throw NumericalError("no finite horizon meets the truncation target");
  }
  double lo = 0.0;
  for (int i = 0; i < 60 && hi - lo > 1e-6 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (truncation_bound(spec, b, x0, mid) > goal ? lo : hi) = mid;
  }
  return hi;
}

ValueEstimate estimate_value(const ValidatedSpec& spec, double b, double x0, const SimConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t samples = samples_for(config);
  if (samples == 0) throw std::invalid_argument("at least one path is required");
  const double C = spec.C();

  double horizon = 0.0;
  if (config.horizon) {
    horizon = *config.horizon;
  } else if (config.target_se > 0.0) {
    horizon = choose_horizon(spec, b, x0, config.target_se);
  } else {
    // Pilot run on an independent seed stream sizes the target standard error.
    const double pilot_T = choose_horizon(spec, b, x0, 0.0);
    const PolicyContext pc = make_context(spec, b, x0, config, pilot_T);
    const std::size_t n = std::min(kPilotPaths, samples);
    const std::uint64_t pilot_seed = path_seed(config.seed, 0x5eedULL) ^ 0xa5a5a5a5a5a5a5a5ULL;
    const Moments<1> pilot = run_blocks<1>(n, config.threads, [&](std::size_t i) {
      Uniforms uni(path_seed(pilot_seed, i), false);
      const PathResult pr = run_policy_path(pc, uni, nullptr, i);
      return std::array<double, 1>{pr.inventory_cost + C * pr.replenishment};
    });
    const double sd = pilot.n > 1.0 ? std::sqrt(pilot.m2[0] / (pilot.n - 1.0)) : 0.0;
    const double target = sd > 0.0 ? sd / std::sqrt(static_cast<double>(config.paths)) : 0.0;
    horizon = choose_horizon(spec, b, x0, target);
  }

  const PolicyContext ctx = make_context(spec, b, x0, config, horizon);
  std::vector<std::vector<TraceEvent>> traces(std::min(config.trace_paths, config.paths));

  auto one = [&](std::size_t path, std::uint64_t seed, bool mirrored) {
    Uniforms uni(seed, mirrored);
    std::vector<TraceEvent>* tr = path < traces.size() ? &traces[path] : nullptr;
    return run_policy_path(ctx, uni, tr, path);
  };
  const Moments<6> mom = run_blocks<6>(samples, config.threads, [&](std::size_t i) {
    std::array<double, 6> out{};
    auto add = [&](const PathResult& pr, double w) {
      out[0] += w * pr.inventory_cost;
      out[1] += w * C * pr.replenishment;
      out[2] += w * (pr.inventory_cost + C * pr.replenishment);
      out[3] += w * pr.occupation;
      out[4] += w * static_cast<double>(pr.replenishment_count);
      out[5] += w * pr.dt_error;
    };
    if (config.antithetic) {
      const std::uint64_t s = path_seed(config.seed, i);
      add(one(2 * i, s, false), 0.5);
      add(one(2 * i + 1, s, true), 0.5);
    } else {
      add(one(i, path_seed(config.seed, i), false), 1.0);
    }
    return out;
  });

  ValueEstimate est;
  const double trunc = truncation_bound(spec, b, x0, horizon);
  const double wall = seconds_since(start);
  auto make = [&](std::size_t k, double tb, double db) {
    SimEstimate e;
    e.mean = mom.mean[k];
    e.se = mom.se(k);
    e.paths = config.paths;
    e.truncation_bound = tb;
    e.dt_bound = db;
    e.horizon = horizon;
    e.wall_clock = wall;
    return e;
  };
  const double dtb = mom.mean[5];
  est.inventory = make(0, trunc, dtb);
  est.replenishment = make(1, trunc, 0.0);
  est.total = make(2, trunc, dtb);
  if (config.occupation) est.occupation = make(3, std::exp(-spec.q() * horizon) / spec.q(), 0.0);
  est.mean_replenishments = mom.mean[4];
  for (auto& tr : traces) est.trace.insert(est.trace.end(), tr.begin(), tr.end());
  return est;
}

SimEstimate estimate_killed_occupation(const LevyModel& model, double rate, double x0, double lo, double hi,
                                       KillRule rule, const SimConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  if (!(rate > 0.0)) throw std::invalid_argument("killing rate must be positive");
  if (!(config.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  const std::size_t samples = samples_for(config);
  const double target = config.target_se > 0.0 ? config.target_se : 1e-4 / rate;
  const double T = config.horizon ? *config.horizon : std::max(0.0, std::log(1.0 / (0.1 * target * rate)) / rate);
  const PiecewisePolynomial ind = PiecewisePolynomial::indicator(lo, hi);
  const JumpSampler sampler(model.jumps);
  const bool above = rule == KillRule::kAboveZero;
  const double sigma = model.sigma;
  const bool ticks = sigma > 0.0;

  auto killed_at_start = [&] {
    if (above) return x0 > 0.0 || (x0 == 0.0 && (sigma > 0.0 || model.mu > 0.0));
    return x0 < 0.0 || (x0 == 0.0 && sigma > 0.0);
  };
  const bool dead = killed_at_start();

  auto path = [&](Uniforms& uni) {
    std::array<double, 2> out{};
    if (dead) return out;
    double t = 0.0;
    double x = x0;
    double next_jump = model.lambda > 0.0 ? uni.exponential() / model.lambda : kInf;
    std::size_t tick = 1;
    double next_tick = ticks ? config.dt : kInf;
    auto accrue = [&](double x_start, double slope, double len) {
      const double disc = std::exp(-rate * t);
      out[0] += disc * ind.discounted_linear_integral(x_start, slope, len, rate);
      const double g0 = ind(x_start);
      const double g1 = std::exp(-rate * len) * ind(x_start + slope * len);
      if (ticks) out[1] += len * disc * std::abs(g1 - g0);
    };
    while (t < T) {
      const double t1 = std::min({next_jump, next_tick, T});
      const double h = t1 - t;
      if (h > 0.0) {
        double x1 = x + model.mu * h;
        if (sigma > 0.0) x1 += sigma * std::sqrt(h) * uni.normal();
        const double slope = (x1 - x) / h;
        const bool crossed = above ? x1 > 0.0 : x1 < 0.0;
        if (crossed) {
          accrue(x, slope, h * x / (x - x1));
          return out;
        }
        accrue(x, slope, h);
        if (sigma > 0.0) {
          // Brownian bridge excursion beyond 0 between the two grid values.
          const double p = std::exp(-2.0 * x * x1 / (sigma * sigma * h));
          if (uni() < p) return out;
        }
        x = x1;
      }
      t = t1;
      if (t >= T) break;
      if (next_tick <= next_jump) {
        next_tick = static_cast<double>(++tick) * config.dt;
        continue;
      }
      x -= sampler(uni);
      if (!above && x < 0.0) return out;
      next_jump = t + uni.exponential() / model.lambda;
    }
    return out;
  };

  const Moments<2> mom = run_blocks<2>(samples, config.threads, [&](std::size_t i) {
    const std::uint64_t s = path_seed(config.seed, i);
    if (!config.antithetic) {
      Uniforms uni(s, false);
      return path(uni);
    }
    Uniforms a(s, false);
    Uniforms b(s, true);
    const auto ra = path(a);
    const auto rb = path(b);
    return std::array<double, 2>{0.5 * (ra[0] + rb[0]), 0.5 * (ra[1] + rb[1])};
  });

  SimEstimate e;
  e.mean = mom.mean[0];
  e.se = mom.se(0);
  e.paths = config.paths;
  e.truncation_bound = std::exp(-rate * T) / rate;
  e.dt_bound = mom.mean[1];
  e.horizon = T;
  e.wall_clock = seconds_since(start);
  return e;
}

SimEstimate estimate_killed_resolvent(const ValidatedSpec& spec, double x0, double lo, double hi,
                                      const SimConfig& config) {
  return estimate_killed_occupation(spec.model(), spec.q() + spec.r(), x0, lo, hi, KillRule::kAboveZero, config);
}

nlohmann::json to_json(const SimEstimate& e) {
  return {{"mean", e.mean},
          {"se", e.se},
          {"paths", e.paths},
          {"truncation_bound", e.truncation_bound},
          {"dt_bound", e.dt_bound},
          {"horizon", e.horizon},
          {"wall_clock_seconds", e.wall_clock}};
}

nlohmann::json to_json(const ValueEstimate& e) {
  nlohmann::json j = {{"total", to_json(e.total)},
                      {"inventory", to_json(e.inventory)},
                      {"replenishment", to_json(e.replenishment)},
                      {"mean_replenishments", e.mean_replenishments}};
  if (e.occupation) j["occupation"] = to_json(*e.occupation);
  return j;
}

std::string trace_csv(const std::vector<TraceEvent>& trace) {
  std::ostringstream os;
  os << "path,t,u,event\n";
  char buf[96];
  for (const auto& ev : trace) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,", ev.path, ev.t, ev.u);
    os << buf << ev.type << '\n';
  }
  return os.str();
}

}  // namespace levy_replenish
