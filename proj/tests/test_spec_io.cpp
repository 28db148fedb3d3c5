#include "doctest.h"
#include "json.hpp"
#include "levy_replenish/spec_io.hpp"
#include "test_support.hpp"

using namespace levy_replenish;
using nlohmann::json;

TEST_SUITE("spec_io") {
  TEST_CASE("parses the shipped specs") {
    const ProblemSpec a = load_problem_spec(levy_test::spec_path("model_a.json"));
    CHECK(a.model.mu == 1.0);
    CHECK(a.model.lambda == 1.0);
    CHECK(a.q == 0.05);
    CHECK(a.r == 0.5);
    CHECK(a.cost.kind == CostKind::kQuadratic);
    CHECK_NOTHROW(validate(a));

    const ProblemSpec ph = load_problem_spec(levy_test::spec_path("phase_type.json"));
    CHECK(ph.model.jumps.form() == JumpLaw::Form::kPhaseType);
    CHECK(ph.cost.kind == CostKind::kPiecewiseLinear);
    CHECK_NOTHROW(validate(ph));

    const ProblemSpec bad = load_problem_spec(levy_test::spec_path("invalid_piecewise.json"));
    CHECK_THROWS_AS(validate(bad), ValidationError);
  }

  TEST_CASE("round trip") {
    const ProblemSpec a = load_problem_spec(levy_test::spec_path("phase_type.json"));
    const json doc = to_json(a);
    const ProblemSpec b = problem_spec_from_json(doc);
    CHECK(to_json(b) == doc);
  }

  TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(problem_spec_from_json(json::array()), SpecParseError);
    CHECK_THROWS_AS(problem_spec_from_json(json{{"q", 0.05}}), SpecParseError);
    json doc = to_json(load_problem_spec(levy_test::spec_path("model_a.json")));
    doc["q"] = "fast";
    CHECK_THROWS_AS(problem_spec_from_json(doc), SpecParseError);
    doc = to_json(load_problem_spec(levy_test::spec_path("model_a.json")));
    doc["cost"]["kind"] = "cubic";
    CHECK_THROWS_AS(problem_spec_from_json(doc), SpecParseError);
    CHECK_THROWS_AS(load_problem_spec(levy_test::spec_path("does_not_exist.json")), SpecParseError);
  }
}
