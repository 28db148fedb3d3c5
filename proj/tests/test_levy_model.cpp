#include <cmath>
#include <random>

#include "doctest.h"
#include "levy_replenish/errors.hpp"
#include "levy_replenish/levy_model.hpp"
#include "levy_replenish/quadrature.hpp"
#include "test_support.hpp"

using namespace levy_replenish;
using levy_test::brownian;
using levy_test::model_a;

TEST_SUITE("levy_model") {
  TEST_CASE("Laplace exponent examples") {
    LevyModel bm;
    bm.sigma = std::sqrt(2.0);
    CHECK(laplace_exponent(bm, 1.0) == doctest::Approx(1.0));
    CHECK(laplace_exponent(model_a(), 1.0) == doctest::Approx(0.5));
    CHECK(laplace_exponent(model_a(), 0.0) == 0.0);
    CHECK(laplace_exponent(bm, 0.0) == 0.0);
    CHECK_THROWS_AS(laplace_exponent(model_a(), -1.5), DomainError);
  }

  TEST_CASE("Phi examples") {
    CHECK(phi(brownian(), 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(phi(model_a(), 0.05) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(phi(model_a(), 0.55) == doctest::Approx(1.0659646009778187).epsilon(1e-14));
  }

  TEST_CASE("kappa prime examples") {
    CHECK(kappa_prime(model_a(), 0.0) == doctest::Approx(0.0));
    CHECK(kappa_prime(brownian(), 2.0) == doctest::Approx(4.0));
    LevyModel m = model_a();
    m.mu = 1.5;
    CHECK(kappa_prime(m, 0.0) == doctest::Approx(0.5));
  }

  TEST_CASE("kappa is convex and matches its derivative") {
    LevyModel m = model_a();
    m.sigma = 0.3;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < 20; ++i) {
      const double t = u(rng);
      const double h = 1e-5 * (1.0 + t);
      const double fd = (laplace_exponent(m, t + h) - laplace_exponent(m, t - h)) / (2.0 * h);
      CHECK(kappa_prime(m, t) == doctest::Approx(fd).epsilon(1e-6));
      const double a = u(rng);
      const double b = u(rng);
      const double w = 0.3;
      CHECK(laplace_exponent(m, w * a + (1 - w) * b) <=
            w * laplace_exponent(m, a) + (1 - w) * laplace_exponent(m, b) + 1e-12);
    }
  }

  TEST_CASE("Phi round trip over a log grid") {
    for (double q = 1e-4; q <= 1e3; q *= 10.0) {
      for (const LevyModel& m : {model_a(), brownian()}) {
        CHECK(std::abs(laplace_exponent(m, phi(m, q)) - q) <= 1e-10 * std::max(1.0, q));
      }
    }
    CHECK(phi(model_a(), 0.5) < phi(model_a(), 0.55));
  }

  TEST_CASE("phase-type law agrees with its hyperexponential form") {
    Eigen::VectorXd alpha(1);
    alpha << 1.0;
    Eigen::MatrixXd T(1, 1);
    T << -2.0;
    const JumpLaw ph = JumpLaw::phase_type(alpha, T);
    const JumpLaw hx = JumpLaw::hyperexponential({1.0}, {2.0});
    CHECK(ph.mean() == doctest::Approx(0.5));
    for (double t : {0.0, 0.5, 3.0}) CHECK(ph.transform(t).real() == doctest::Approx(hx.transform(t).real()));

    Eigen::VectorXd a2(2);
    a2 << 0.6, 0.4;
    Eigen::MatrixXd T2(2, 2);
    T2 << -3.0, 1.0, 0.5, -1.5;
    const JumpLaw law = JumpLaw::phase_type(a2, T2);
    CHECK(law.invariant_violations().empty());
    // E[J] = alpha (-T)^{-1} 1.
    const double mean = (a2.transpose() * (-T2).inverse() * Eigen::VectorXd::Ones(2))(0);
    CHECK(law.mean() == doctest::Approx(mean));
    for (double t : {0.1, 1.0, 4.0}) {
      const std::complex<double> ratio = law.numerator()(std::complex<double>(t)) / law.denominator()(std::complex<double>(t));
      CHECK(ratio.real() == doctest::Approx(law.transform(t).real()).epsilon(1e-12));
    }
  }

  TEST_CASE("validation accepts and rejects") {
    CHECK_NOTHROW(validate(levy_test::quadratic_problem(model_a(), 0.05, 0.5, 1.0)));

    ProblemSpec pl = levy_test::quadratic_problem(model_a(), 0.05, 0.5, 1.0);
    pl.cost = CostModel::piecewise_linear(1.0, 0.01);
    auto issues = check_assumptions(pl);
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].assumption == Assumption::kCostSlope);
    CHECK_THROWS_AS(validate(pl), ValidationError);

    LevyModel sub = model_a();
    sub.mu = -1.0;
    issues = check_assumptions(levy_test::quadratic_problem(sub, 0.05, 0.5, 1.0));
    REQUIRE_FALSE(issues.empty());
    CHECK(issues[0].assumption == Assumption::kNonMonotonePath);

    LevyModel drift;
    drift.mu = 1.0;
    CHECK_THROWS_AS(validate(levy_test::quadratic_problem(drift, 0.05, 0.5, 1.0)), ValidationError);
    drift.allow_degenerate = true;
    CHECK_NOTHROW(validate(levy_test::quadratic_problem(drift, 0.05, 0.5, 1.0)));

    issues = check_assumptions(levy_test::quadratic_problem(model_a(), -0.05, 0.5, 1.0));
    REQUIRE_FALSE(issues.empty());
    CHECK(issues[0].assumption == Assumption::kPositiveRates);

    ProblemSpec cubic = levy_test::quadratic_problem(model_a(), 0.05, 0.5, 1.0);
    cubic.cost = CostModel::polynomial({0.0, 0.0, 0.0, 1.0});
    issues = check_assumptions(cubic);
    REQUIRE_FALSE(issues.empty());
    CHECK(issues[0].assumption == Assumption::kCostConvexity);
  }

  TEST_CASE("validated spec caches roots") {
    const ValidatedSpec s = levy_test::model_a_spec();
    CHECK(s.phi_q() == doctest::Approx(0.25));
    CHECK(s.phi_qr() == doctest::Approx(1.0659646009778187));
    CHECK(s.mean_drift() == doctest::Approx(0.0));
    CHECK(s.with_r(5.0).phi_qr() == doctest::Approx(phi(model_a(), 5.05)));
  }

  TEST_CASE("piecewise polynomial and discounted segments") {
    const PiecewisePolynomial f({0.0}, {Polynomial{0.0, -5.0}, Polynomial{0.0, 1.0}});
    CHECK(f(-2.0) == doctest::Approx(10.0));
    CHECK(f(3.0) == doctest::Approx(3.0));
    CHECK(f.derivative(0.0, Side::kLeft) == doctest::Approx(-5.0));
    CHECK(f.derivative(0.0, Side::kRight) == doctest::Approx(1.0));
    CHECK(f.limit_slope(-1) == doctest::Approx(-5.0));
    CHECK(f.limit_slope(1) == doctest::Approx(1.0));

    // int_0^L e^{-q t} (1 + t)^2 dt against adaptive quadrature.
    const PiecewisePolynomial g(Polynomial{0.0, 0.0, 1.0});
    const double q = 0.05;
    for (double L : {1e-3, 0.5, 7.0, 300.0}) {
      const double ref = integrate([q](double t) { return std::exp(-q * t) * (1 + t) * (1 + t); }, 0.0, L, {},
                                   QuadratureConfig{})
                             .value;
      CHECK(g.discounted_linear_integral(1.0, 1.0, L, q) == doctest::Approx(ref).epsilon(1e-12));
    }
    // Crossing the kink of f.
    const double crossing = f.discounted_linear_integral(-1.0, 1.0, 2.0, 0.0);
    CHECK(crossing == doctest::Approx(2.5 + 0.5));
  }
}
