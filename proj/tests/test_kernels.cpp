#include "zanova/kernels.hpp"
#include "zanova/quadrature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "support.hpp"

using namespace zanova;

TEST_SUITE("kernels") {
  TEST_CASE("catalog values") {
    const auto m = UnivariateKernel::matern32(1.0);
    CHECK(m(0.0, 0.0) == 1.0);
    CHECK(m(0.0, 1.0) == doctest::Approx(3.0 * std::exp(-2.0)).epsilon(1e-14));
    CHECK(m(0.0, 1.0) == doctest::Approx(0.40601).epsilon(1e-5));
    CHECK(UnivariateKernel::brownian()(1.0, 2.5) == 1.0);
    CHECK(UnivariateKernel::shifted_brownian()(0.0, 0.0) == 1.0);
    CHECK(UnivariateKernel::gaussian(2.0)(0.0, 2.0) == doctest::Approx(std::exp(-1.0)));
  }

  TEST_CASE("gram") {
    const std::vector<double> zero{0.0};
    const auto g = gram(UnivariateKernel::gaussian(1.0), zero, zero);
    REQUIRE(g.rows() == 1);
    CHECK(g(0, 0) == 1.0);

    const std::vector<double> xs{1.0, 2.5, 4.0};
    Eigen::Matrix3d expected;
    expected << 1, 1, 1, 1, 2.5, 2.5, 1, 2.5, 4;
    CHECK((gram(UnivariateKernel::brownian(), xs, xs) - expected).norm() == 0.0);

    const std::vector<double> none;
    const auto empty = gram(UnivariateKernel::matern32(), none, none);
    CHECK(empty.rows() == 0);
    CHECK(empty.cols() == 0);
  }

  TEST_CASE("gram matches pointwise evaluation and is symmetric") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (const auto& k : support::catalog()) {
      std::vector<double> xs(9), ys(4);
      for (double& x : xs) x = u(rng);
      for (double& y : ys) y = u(rng);
      const auto kk = gram(k, xs, xs);
      const auto ky = gram(k, xs, ys);
      for (std::size_t a = 0; a < xs.size(); ++a) {
        for (std::size_t b = 0; b < xs.size(); ++b) CHECK(kk(a, b) == k(xs[a], xs[b]));
        for (std::size_t b = 0; b < ys.size(); ++b) CHECK(ky(a, b) == k(xs[a], ys[b]));
      }
      CHECK((kk - kk.transpose()).norm() == 0.0);
    }
  }

  TEST_CASE("domain and parameter errors") {
    CHECK_THROWS_AS(UnivariateKernel::brownian()(-0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(UnivariateKernel::shifted_brownian()(1.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(UnivariateKernel::gaussian(0.0), std::invalid_argument);
    CHECK_THROWS_AS(UnivariateKernel::matern32(-1.0), std::invalid_argument);
  }

  TEST_CASE("family names round trip") {
    for (auto f : {KernelFamily::brownian, KernelFamily::shifted_brownian, KernelFamily::gaussian,
                   KernelFamily::matern32})
      CHECK(parse_family(family_name(f)) == f);
    CHECK_THROWS_AS(parse_family("cubic"), std::invalid_argument);
  }

  TEST_CASE("custom kernel") {
    const auto k = UnivariateKernel::custom("poly", [](double x, double y) { return 1.0 + x * y; });
    CHECK(k.family() == KernelFamily::custom);
    CHECK(k(2.0, 3.0) == 7.0);
    CHECK(k.name() == "poly");
  }

  TEST_CASE("sqrt of the integrated diagonal") {
    const auto rule = build_rule(Measure::uniform(0.0, 5.0));
    CHECK(sqrt_diagonal_integral(UnivariateKernel::matern32(), rule) == doctest::Approx(1.0));
    CHECK(std::abs(sqrt_diagonal_integral(UnivariateKernel::brownian(), rule) - 2.0 * std::sqrt(5.0) / 3.0) < 1e-3);
  }
}
