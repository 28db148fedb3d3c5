#include "levy_replenish/spec_io.hpp"

#include <fstream>

namespace levy_replenish {

using nlohmann::json;

namespace {

double number(const json& obj, const char* key, const char* where) {
  if (!obj.contains(key)) throw SpecParseError(std::string(where) + ": missing field \"" + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number()) throw SpecParseError(std::string(where) + ": field \"" + key + "\" must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const char* where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::vector<double> number_list(const json& v, const char* what) {
  if (!v.is_array()) throw SpecParseError(std::string(what) + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw SpecParseError(std::string(what) + " must be an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

JumpLaw jump_law_from_json(const json& j) {
  if (!j.is_object()) throw SpecParseError("model.jumps must be an object");
  if (j.contains("alpha") || j.contains("T")) {
    if (!j.contains("alpha") || !j.contains("T")) throw SpecParseError("phase-type jumps need both \"alpha\" and \"T\"");
    const auto alpha = number_list(j.at("alpha"), "jumps.alpha");
    const json& t = j.at("T");
    if (!t.is_array()) throw SpecParseError("jumps.T must be a matrix (array of rows)");
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::MatrixXd gen(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto row = number_list(t.at(static_cast<std::size_t>(i)), "jumps.T row");
      if (static_cast<Eigen::Index>(row.size()) != n) throw SpecParseError("jumps.T must be square");
      for (Eigen::Index k = 0; k < n; ++k) gen(i, k) = row[static_cast<std::size_t>(k)];
    }
    Eigen::VectorXd a(static_cast<Eigen::Index>(alpha.size()));
    for (std::size_t i = 0; i < alpha.size(); ++i) a(static_cast<Eigen::Index>(i)) = alpha[i];
    return JumpLaw::phase_type(std::move(a), std::move(gen));
  }
  if (!j.contains("weights") || !j.contains("rates"))
    throw SpecParseError("model.jumps needs \"weights\" and \"rates\" (or \"alpha\" and \"T\")");
  return JumpLaw::hyperexponential(number_list(j.at("weights"), "jumps.weights"),
                                   number_list(j.at("rates"), "jumps.rates"));
}

CostModel cost_from_json(const json& c) {
  if (!c.is_object() || !c.contains("kind") || !c.at("kind").is_string())
    throw SpecParseError("cost must be an object with a string \"kind\"");
  const auto kind = c.at("kind").get<std::string>();
  if (kind == "quadratic") return CostModel::quadratic();
  if (kind == "piecewise_linear") return CostModel::piecewise_linear(number(c, "h", "cost"), number(c, "p", "cost"));
  if (kind == "polynomial") {
    if (!c.contains("coefficients")) throw SpecParseError("polynomial cost needs \"coefficients\"");
    return CostModel::polynomial(number_list(c.at("coefficients"), "cost.coefficients"));
  }
  throw SpecParseError("unknown cost kind \"" + kind + "\" (quadratic, piecewise_linear, polynomial)");
}

}  // namespace

ProblemSpec problem_spec_from_json(const json& doc) {
  if (!doc.is_object()) throw SpecParseError("spec must be a JSON object");
  if (!doc.contains("model") || !doc.at("model").is_object()) throw SpecParseError("spec: missing object \"model\"");
  const json& m = doc.at("model");
  ProblemSpec spec;
  spec.model.mu = number(m, "mu", "model");
  spec.model.sigma = number_or(m, "sigma", 0.0, "model");
  spec.model.lambda = number_or(m, "lambda", 0.0, "model");
  if (m.contains("jumps") && !m.at("jumps").is_null()) spec.model.jumps = jump_law_from_json(m.at("jumps"));
  if (m.contains("allow_degenerate")) {
    if (!m.at("allow_degenerate").is_boolean()) throw SpecParseError("model.allow_degenerate must be a boolean");
    spec.model.allow_degenerate = m.at("allow_degenerate").get<bool>();
  }
  spec.q = number(doc, "q", "spec");
  spec.r = number(doc, "r", "spec");
  spec.C = number(doc, "C", "spec");
  spec.cost = doc.contains("cost") ? cost_from_json(doc.at("cost")) : CostModel::quadratic();
  return spec;
}

ProblemSpec load_problem_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecParseError("cannot open spec file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw SpecParseError("spec file " + path + " is not valid JSON: " + e.what());
  }
  return problem_spec_from_json(doc);
}

json to_json(const ProblemSpec& spec) {
  json model = {{"mu", spec.model.mu}, {"sigma", spec.model.sigma}, {"lambda", spec.model.lambda}};
  const JumpLaw& law = spec.model.jumps;
  if (law.form() == JumpLaw::Form::kHyperexponential) {
    model["jumps"] = {{"weights", law.weights()}, {"rates", law.rates()}};
  } else if (law.form() == JumpLaw::Form::kPhaseType) {
    json t = json::array();
    for (Eigen::Index i = 0; i < law.generator().rows(); ++i) {
      json row = json::array();
      for (Eigen::Index k = 0; k < law.generator().cols(); ++k) row.push_back(law.generator()(i, k));
      t.push_back(row);
    }
    model["jumps"] = {{"alpha", std::vector<double>(law.alpha().data(), law.alpha().data() + law.alpha().size())},
                      {"T", t}};
  }
  if (spec.model.allow_degenerate) model["allow_degenerate"] = true;

  json cost = {{"kind", std::string(cost_kind_name(spec.cost.kind))}};
  if (spec.cost.kind == CostKind::kPiecewiseLinear) {
    cost["h"] = spec.cost.holding;
    cost["p"] = spec.cost.shortage;
  } else if (spec.cost.kind == CostKind::kPolynomial) {
    cost["coefficients"] = spec.cost.coefficients;
  }
  return {{"model", model}, {"q", spec.q}, {"r", spec.r}, {"C", spec.C}, {"cost", cost}};
}

}  // namespace levy_replenish
