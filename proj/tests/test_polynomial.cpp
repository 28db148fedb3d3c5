#include <algorithm>
#include <complex>

#include "doctest.h"
#include "levy_replenish/polynomial.hpp"

using levy_replenish::Polynomial;

TEST_SUITE("polynomial") {
  TEST_CASE("arithmetic and evaluation") {
    const Polynomial p{1.0, -2.0, 1.0};  // (x - 1)^2
    CHECK(p.degree() == 2);
    CHECK(p(1.0) == doctest::Approx(0.0));
    CHECK(p(3.0) == doctest::Approx(4.0));
    const Polynomial d = p.derivative();
    CHECK(d.degree() == 1);
    CHECK(d(3.0) == doctest::Approx(4.0));
    const Polynomial prod = p * Polynomial{1.0, 1.0};
    CHECK(prod.degree() == 3);
    CHECK(prod(2.0) == doctest::Approx(3.0));
    CHECK((p - p).is_zero());
    CHECK((p - p).degree() == -1);
  }

  TEST_CASE("affine composition") {
    const Polynomial p{0.0, 0.0, 1.0};
    const Polynomial c = p.compose_affine(2.0, 3.0);  // (2 + 3y)^2
    CHECK(c.coefficient(0) == doctest::Approx(4.0));
    CHECK(c.coefficient(1) == doctest::Approx(12.0));
    CHECK(c.coefficient(2) == doctest::Approx(9.0));
  }

  TEST_CASE("companion-matrix roots") {
    // theta^2 - 0.05 theta - 0.05 has roots 0.25 and -0.2.
    auto roots = levy_replenish::polynomial_roots(Polynomial{-0.05, -0.05, 1.0});
    REQUIRE(roots.size() == 2);
    std::sort(roots.begin(), roots.end(), [](auto a, auto b) { return a.real() > b.real(); });
    CHECK(roots[0].real() == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(roots[1].real() == doctest::Approx(-0.2).epsilon(1e-14));
    CHECK(std::abs(roots[0].imag()) < 1e-14);

    // x^2 + 1: a conjugate pair.
    const auto pair = levy_replenish::polynomial_roots(Polynomial{1.0, 0.0, 1.0});
    REQUIRE(pair.size() == 2);
    for (const auto& z : pair) {
      CHECK(std::abs(z.real()) < 1e-14);
      CHECK(std::abs(std::abs(z.imag()) - 1.0) < 1e-14);
    }
  }
}
