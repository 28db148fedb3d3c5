#pragma once

#include <cmath>
#include <string>

#include "levy_replenish/levy_model.hpp"

namespace levy_test {

using namespace levy_replenish;

/// mu = 1, lambda = 1, Exp(1) demand jumps.
inline LevyModel model_a() {
  LevyModel m;
  m.mu = 1.0;
  m.lambda = 1.0;
  m.jumps = JumpLaw::hyperexponential({1.0}, {1.0});
  return m;
}

/// kappa(theta) = theta^2 / 2 * sigma^2 with sigma = sqrt(2), i.e. kappa(theta) = theta^2.
inline LevyModel brownian(double sigma = std::sqrt(2.0)) {
  LevyModel m;
  m.sigma = sigma;
  return m;
}

inline ProblemSpec quadratic_problem(LevyModel m, double q, double r, double C) {
  ProblemSpec s;
  s.model = std::move(m);
  s.q = q;
  s.r = r;
  s.C = C;
  s.cost = CostModel::quadratic();
  return s;
}

inline ValidatedSpec model_a_spec() { return validate(quadratic_problem(model_a(), 0.05, 0.5, 1.0)); }

inline std::string spec_path(const std::string& name) { return std::string(LEVY_SPEC_DIR) + "/" + name; }

}  // namespace levy_test
