#include "zanova/error.hpp"
#include "zanova/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace zanova;

TEST_SUITE("quadrature") {
  TEST_CASE("uniform midpoint rule on [0,5]") {
    const auto rule = build_rule(Measure::uniform(0.0, 5.0), 100);
    REQUIRE(rule.size() == 100);
    CHECK(rule.nodes()[0] == doctest::Approx(0.025).epsilon(1e-14));
    CHECK(rule.nodes()[1] == doctest::Approx(0.075).epsilon(1e-14));
    CHECK(rule.nodes()[99] == doctest::Approx(4.975).epsilon(1e-14));
    for (double w : rule.weights()) CHECK(w == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(rule.lower() == 0.0);
    CHECK(rule.upper() == 5.0);
  }

  TEST_CASE("too few nodes is rejected") {
    CHECK_THROWS_AS(build_rule(Measure::uniform(0.0, 1.0), 1), std::invalid_argument);
    CHECK_THROWS_AS(build_rule(Measure::uniform(0.0, 1.0), 0), std::invalid_argument);
  }

  TEST_CASE("truncated normal rule is normalized and centered") {
    const auto rule = build_rule(Measure::standard_normal(), 400);
    double sum = 0.0, mean = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      sum += rule.weights()[q];
      mean += rule.weights()[q] * rule.nodes()[q];
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
    CHECK(std::abs(mean) < 1e-10);
  }

  TEST_CASE("integrate") {
    const auto rule = build_rule(Measure::uniform(0.0, 5.0), 100);
    CHECK(integrate(rule, [](double) { return 3.0; }) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(std::abs(integrate(rule, [](double s) { return std::min(2.0, s); }) - 1.6) < 1e-3);
    const auto normal = build_rule(Measure::standard_normal(), 400);
    CHECK(std::abs(integrate(normal, [](double s) { return s * s; }) - 1.0) < 1e-4);
    CHECK_THROWS_AS(integrate(rule, [](double) { return std::nan(""); }), NumericalError);
  }

  TEST_CASE("midpoint rule is exact for affine integrands") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
      double a = u(rng), b = u(rng);
      if (a > b) std::swap(a, b);
      if (b - a < 1e-3) continue;
      const double c0 = u(rng), c1 = u(rng);
      const int n = 2 + trial % 40;
      const auto rule = build_rule(Measure::uniform(a, b), n);
      const double exact = c0 + c1 * (a + b) / 2.0;
      CHECK(std::abs(integrate(rule, [&](double s) { return c0 + c1 * s; }) - exact) < 1e-12);
    }
  }

  TEST_CASE("measure and rule validation") {
    CHECK_THROWS_AS(Measure::uniform(1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(Measure::uniform(0.0, INFINITY), std::invalid_argument);
    CHECK_THROWS_AS(Measure::standard_normal(2.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(QuadratureRule({0.5, 0.2}, {0.5, 0.5}, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(QuadratureRule({0.2, 0.5}, {0.5, 0.4}, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(QuadratureRule({0.2, 1.5}, {0.5, 0.5}, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(QuadratureRule({0.2, 0.5}, {1.5, -0.5}, 0.0, 1.0), std::invalid_argument);
    CHECK_NOTHROW(QuadratureRule({0.2, 0.5}, {0.5, 0.5}, 0.0, 1.0));
    CHECK(measure_kind_name(MeasureKind::standard_normal) == "normal");
  }
}
