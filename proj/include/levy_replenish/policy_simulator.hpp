#pragma once

// Event-driven Monte Carlo of the inventory under the periodic barrier policy, and of the
// uncontrolled process killed at a first-passage time.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "levy_replenish/levy_model.hpp"

namespace levy_replenish {

enum class CostIntegration {
  /// Exact discounted integral of f along each linear piece of the path (drift segments,
  /// or linear interpolation between Gaussian ticks when sigma > 0).
  kExactSegments,
  /// Left-endpoint rule e^{-q t_k} f(U(t_k)) (t_{k+1} - t_k) on the event-refined grid.
  kLeftEndpoint,
};

struct SimConfig {
  std::size_t paths = 10000;
  /// Simulated time horizon. When unset it is chosen so that the truncation bound is at most
  /// 0.1 * target_se.
  std::optional<double> horizon;
  /// Grid step for Gaussian increments (sigma > 0) and for the left-endpoint rule.
  double dt = 1e-3;
  std::uint64_t seed = 0;
  /// Pairs of paths driven by mirrored uniforms u and 1 - u; requires an even path count.
  bool antithetic = false;
  CostIntegration integration = CostIntegration::kExactSegments;
  /// Standard error the horizon rule aims for. Zero means 1e-4 times the cost scale.
  double target_se = 0.0;
  /// Also estimate the discounted occupation time of this interval.
  std::optional<std::pair<double, double>> occupation;
  /// Number of leading paths whose events are recorded.
  std::size_t trace_paths = 0;
  /// Worker threads; zero uses the hardware concurrency. Results do not depend on it.
  unsigned threads = 0;
};

struct SimEstimate {
  double mean = 0.0;
  double se = 0.0;  ///< sample standard deviation / sqrt(independent samples)
  std::size_t paths = 0;
  double truncation_bound = 0.0;
  double dt_bound = 0.0;
  double horizon = 0.0;
  double wall_clock = 0.0;  ///< seconds
};

nlohmann::json to_json(const SimEstimate& e);

struct TraceEvent {
  std::size_t path = 0;
  double t = 0.0;
  double u = 0.0;
  std::string type;  ///< start, jump, observe, replenish, end
};

struct PathResult {
  double inventory_cost = 0.0;      ///< int_0^T e^{-qt} f(U(t)) dt
  double replenishment = 0.0;       ///< sum e^{-q T_i} (b - U(T_i-))
  std::size_t replenishment_count = 0;
  double occupation = 0.0;          ///< discounted time in SimConfig::occupation
  double dt_error = 0.0;            ///< sum_k h_k |g(t_{k+1}-) - g(t_k)|, g = e^{-qt} f(U)
};

/// One path with its own seed. `mirrored` applies the antithetic transform u -> 1 - u.
PathResult simulate_path(const ValidatedSpec& spec, double b, double x0, const SimConfig& config, double horizon,
                         std::uint64_t path_seed, bool mirrored = false, std::vector<TraceEvent>* trace = nullptr,
                         std::size_t path_index = 0);

struct ValueEstimate {
  SimEstimate inventory;
  SimEstimate replenishment;  ///< C times the discounted replenished amount
  SimEstimate total;
  std::optional<SimEstimate> occupation;
  double mean_replenishments = 0.0;
  std::vector<TraceEvent> trace;
};

nlohmann::json to_json(const ValueEstimate& e);

/// Horizon used when SimConfig::horizon is unset, and the corresponding truncation bound.
double choose_horizon(const ValidatedSpec& spec, double b, double x0, double target_se);
double truncation_bound(const ValidatedSpec& spec, double b, double x0, double horizon);

ValueEstimate estimate_value(const ValidatedSpec& spec, double b, double x0, const SimConfig& config);

enum class KillRule { kAboveZero, kBelowZero };

/// E_x[int_0^tau e^{-rate t} 1{X(t) in [lo, hi]} dt] for the uncontrolled process, where tau
/// is the first passage above 0 (kAboveZero) or below 0 (kBelowZero).
SimEstimate estimate_killed_occupation(const LevyModel& model, double rate, double x0, double lo, double hi,
                                       KillRule rule, const SimConfig& config);

/// Killed (q+r)-resolvent of [lo, hi] subset of (-inf, 0] started from x0 <= 0.
SimEstimate estimate_killed_resolvent(const ValidatedSpec& spec, double x0, double lo, double hi,
                                      const SimConfig& config);

std::string trace_csv(const std::vector<TraceEvent>& trace);

/// Seed of path `index` under base seed `seed` (splitmix64 mixing).
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace levy_replenish
