#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "levy_replenish/barrier_solver.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace levy_replenish;
namespace oracle = levy_test::oracle;

TEST_SUITE("barrier_solver") {
  TEST_CASE("quadratic cost closed form") {
    const ValidatedSpec s = levy_test::model_a_spec();
    CHECK(bstar_quadratic_closed_form(s) == doctest::Approx(oracle::kBStar).epsilon(1e-14));
    const SolveResult r = solve_bstar(Valuator(s));
    CHECK(std::abs(r.b_star - oracle::kBStar) < 1e-8);
    CHECK(r.closed_form_available);
    CHECK(r.bracket_lo <= r.b_star);
    CHECK(r.b_star <= r.bracket_hi);
    CHECK(r.residual < 1e-8);

    const ValidatedSpec c0 = s.with_C(0.0);
    CHECK(bstar_quadratic_closed_form(c0) == doctest::Approx(1.0 / s.phi_qr() - 1.0 / s.phi_q()).epsilon(1e-14));

    const ValidatedSpec bm = validate(levy_test::quadratic_problem(levy_test::brownian(), 1.0, 3.0, 0.0));
    CHECK(bstar_quadratic_closed_form(bm) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(solve_bstar(Valuator(bm)).b_star == doctest::Approx(-0.5).epsilon(1e-10));
  }

  TEST_CASE("closed form needs a quadratic cost") {
    ProblemSpec p = levy_test::quadratic_problem(levy_test::model_a(), 0.05, 0.5, 1.0);
    p.cost = CostModel::piecewise_linear(1.0, 5.0);
    CHECK_THROWS_AS(bstar_quadratic_closed_form(validate(p)), std::invalid_argument);
    const Valuator v(validate(p));
    const SolveResult r = solve_bstar(v);
    CHECK_FALSE(r.closed_form_available);
    CHECK(std::abs(v.m_func(r.b_star)) < 1e-8);
  }

  TEST_CASE("sign structure of M") {
    const Valuator v(levy_test::model_a_spec());
    const double b = solve_bstar(v).b_star;
    for (double d : {0.1, 1.0, 10.0}) {
      CHECK(v.m_func(b - d) < 0.0);
      CHECK(v.m_func(b + d) > 0.0);
    }
  }

  TEST_CASE("continuous-monitoring limit") {
    const ValidatedSpec s = levy_test::model_a_spec();
    const double cb = classical_bstar(s);
    CHECK(std::abs(classical_m(s, cb)) < 1e-10);
    const double b1000 = solve_bstar(Valuator(s.with_r(1000.0))).b_star;
    CHECK(std::abs(b1000 - cb) < 0.01);
  }

  TEST_CASE("sweeps") {
    const ValidatedSpec s = levy_test::model_a_spec();
    const SweepResult rs = sweep(s, SweepParam::kR, {0.1, 1, 10, 100, 1000}, {-3.0, 0.0});
    REQUIRE(rs.b_decreasing.has_value());
    CHECK(*rs.b_decreasing);
    CHECK(*rs.value_monotone);

    const SweepResult cs = sweep(s, SweepParam::kC, {-10, -1, 0, 1, 10}, {-3.0, 0.0});
    CHECK(*cs.b_decreasing);
    CHECK(*cs.value_monotone);
    for (const auto& row : cs.rows) CHECK(row.ok);

    const SweepResult single = sweep(s, SweepParam::kC, {1.0}, {0.0});
    REQUIRE(single.rows.size() == 1);
    CHECK(single.rows[0].b == doctest::Approx(solve_bstar(Valuator(s)).b_star).epsilon(1e-12));

    const SweepResult bs = sweep(s, SweepParam::kB, {-5, -4, -3, -2, -1}, {-6.0, -3.0, 0.0, 3.0});
    REQUIRE(bs.minimum_at_bstar.has_value());
    CHECK(*bs.minimum_at_bstar);

    const std::string csv = sweep_csv(rs);
    CHECK(csv.rfind("param_name,param_value,b_star,residual,v(-3),v(0),status\n", 0) == 0);
    CHECK(parse_sweep_param("r") == SweepParam::kR);
    CHECK_THROWS_AS(parse_sweep_param("q"), std::invalid_argument);
  }
}
