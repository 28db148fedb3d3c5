#include <cmath>
#include <limits>
#include <set>

#include "doctest.h"
#include "levy_replenish/policy_simulator.hpp"
#include "levy_replenish/valuation.hpp"
#include "test_support.hpp"

using namespace levy_replenish;

namespace {

ValidatedSpec drift_only() {
  LevyModel m;
  m.mu = 1.0;
  m.allow_degenerate = true;
  return validate(levy_test::quadratic_problem(m, 0.05, 0.5, 1.0));
}

double combined_se(const SimEstimate& a, const SimEstimate& b) { return std::sqrt(a.se * a.se + b.se * b.se); }

}  // namespace

TEST_SUITE("policy_simulator") {
  TEST_CASE("drift-only closed form") {
    const double q = 0.05;
    const double expected = 1 / q + 2 / (q * q) + 2 / (q * q * q);
    CHECK(expected == doctest::Approx(16820.0));
    SimConfig cfg;
    cfg.paths = 4;
    cfg.seed = 1;
    const ValueEstimate exact = estimate_value(drift_only(), -100.0, 1.0, cfg);
    CHECK(exact.mean_replenishments == 0.0);
    CHECK(exact.replenishment.mean == 0.0);
    CHECK(std::abs(exact.total.mean - expected) <= exact.total.truncation_bound + exact.total.dt_bound + 1e-8 * expected);

    cfg.integration = CostIntegration::kLeftEndpoint;
    const ValueEstimate left = estimate_value(drift_only(), -100.0, 1.0, cfg);
    CHECK(left.total.dt_bound > 0.0);
    CHECK(std::abs(left.total.mean - expected) <= left.total.truncation_bound + left.total.dt_bound);
  }

  TEST_CASE("zero horizon") {
    SimConfig cfg;
    cfg.paths = 10;
    cfg.horizon = 0.0;
    const ValueEstimate e = estimate_value(levy_test::model_a_spec(), 0.0, -1.0, cfg);
    CHECK(e.inventory.mean == 0.0);
    CHECK(e.replenishment.mean == 0.0);
  }

  TEST_CASE("fixed seeds reproduce estimates exactly") {
    SimConfig cfg;
    cfg.paths = 3000;
    cfg.seed = 42;
    cfg.horizon = 100.0;
    cfg.threads = 1;
    const ValidatedSpec s = levy_test::model_a_spec();
    const ValueEstimate a = estimate_value(s, -3.0, -3.0, cfg);
    cfg.threads = 4;
    const ValueEstimate b = estimate_value(s, -3.0, -3.0, cfg);
    CHECK(a.total.mean == b.total.mean);
    CHECK(a.total.se == b.total.se);
    cfg.seed = 43;
    const ValueEstimate c = estimate_value(s, -3.0, -3.0, cfg);
    CHECK(a.total.mean != c.total.mean);

    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(path_seed(42, i));
    CHECK(seeds.size() == 1000);
  }

  TEST_CASE("antithetic and plain estimates agree") {
    SimConfig cfg;
    cfg.paths = 4000;
    cfg.seed = 3;
    cfg.horizon = 150.0;
    const ValidatedSpec s = levy_test::model_a_spec();
    const ValueEstimate plain = estimate_value(s, -3.0, -2.0, cfg);
    cfg.antithetic = true;
    const ValueEstimate anti = estimate_value(s, -3.0, -2.0, cfg);
    CHECK(std::abs(plain.total.mean - anti.total.mean) <= 3.0 * combined_se(plain.total, anti.total));
    cfg.paths = 4001;
    CHECK_THROWS_AS(estimate_value(s, -3.0, -2.0, cfg), std::invalid_argument);
  }

  TEST_CASE("zero unit cost leaves only the inventory part") {
    const ValidatedSpec s = levy_test::model_a_spec().with_C(0.0);
    SimConfig cfg;
    cfg.paths = 500;
    cfg.seed = 8;
    cfg.horizon = 100.0;
    const ValueEstimate e = estimate_value(s, -3.0, 0.0, cfg);
    CHECK(e.total.mean == e.inventory.mean);
    CHECK(e.mean_replenishments > 0.0);
  }

  TEST_CASE("control cost against the closed form") {
    const ValidatedSpec s = levy_test::model_a_spec();
    SimConfig cfg;
    cfg.paths = 20000;
    cfg.seed = 17;
    const ValueEstimate e = estimate_value(s, 0.0, 0.0, cfg);
    const double exact = Valuator(s).control_cost(0.0, 0.0);
    CHECK(std::abs(e.replenishment.mean - exact) <= 3.0 * e.replenishment.se + e.replenishment.truncation_bound);
  }

  TEST_CASE("frequent observation keeps the inventory near the barrier") {
    const ValidatedSpec s = levy_test::model_a_spec().with_r(1e4);
    SimConfig cfg;
    cfg.paths = 20;
    cfg.seed = 2;
    cfg.horizon = 40.0;
    cfg.occupation = std::make_pair(-200.0, -1.0);
    const ValueEstimate e = estimate_value(s, 0.0, 0.0, cfg);
    REQUIRE(e.occupation.has_value());
    const double total_time = (1 - std::exp(-0.05 * 40.0)) / 0.05;
    CHECK(e.occupation->mean / total_time < 0.01);
  }

  TEST_CASE("killed resolvent edge cases") {
    const ValidatedSpec s = levy_test::model_a_spec();
    SimConfig cfg;
    cfg.paths = 2000;
    cfg.seed = 4;
    const SimEstimate empty = estimate_killed_resolvent(s, -1.0, -0.5, -0.5, cfg);
    CHECK(empty.mean == 0.0);
    const SimEstimate all = estimate_killed_resolvent(s, -1e-9, -1e9, 0.0, cfg);
    CHECK(all.mean <= 1.0 / 0.55 + 1e-12);
    CHECK(all.mean > 0.0);
  }

  TEST_CASE("traces") {
    SimConfig cfg;
    cfg.paths = 4;
    cfg.seed = 5;
    cfg.horizon = 10.0;
    cfg.trace_paths = 2;
    const ValueEstimate e = estimate_value(levy_test::model_a_spec(), -3.0, 0.0, cfg);
    REQUIRE_FALSE(e.trace.empty());
    CHECK(e.trace.front().type == "start");
    std::set<std::size_t> paths;
    for (const auto& ev : e.trace) paths.insert(ev.path);
    CHECK(paths.size() == 2);
    const std::string csv = trace_csv(e.trace);
    CHECK(csv.rfind("path,t,u,event\n", 0) == 0);
  }
}
