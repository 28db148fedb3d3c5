#pragma once

#include "json.hpp"

#include <stdexcept>
#include <string>

#include "levy_replenish/levy_model.hpp"

namespace levy_replenish {

/// Malformed JSON document (missing field, wrong type). Distinct from ValidationError, which
/// reports well-formed specs that violate a modelling assumption.
class SpecParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// {"model":{"mu":..,"sigma":..,"lambda":..,"jumps":{"weights":[..],"rates":[..]}},
///  "q":..,"r":..,"C":..,"cost":{"kind":"quadratic"}}
/// Phase-type jumps use {"alpha":[..],"T":[[..],..]}. Costs: {"kind":"piecewise_linear",
/// "h":..,"p":..} and {"kind":"polynomial","coefficients":[c0,c1,..]}.
ProblemSpec problem_spec_from_json(const nlohmann::json& doc);
ProblemSpec load_problem_spec(const std::string& path);

nlohmann::json to_json(const ProblemSpec& spec);

}  // namespace levy_replenish
