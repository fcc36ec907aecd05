#include "zanova/anova_kernel.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <random>

#include "support.hpp"

using namespace zanova;

namespace {
const QuadratureRule& unit_rule() {
  static const auto rule = build_rule(Measure::uniform(0.0, 1.0), 100);
  return rule;
}
}  // namespace

TEST_SUITE("anova_kernel") {
  TEST_CASE("star kernel on the diagonal") {
    const auto k = support::star_kernel(UnivariateKernel::matern32(1.0), 2, unit_rule(), 2.5);
    const ZeroMeanKernel zk(UnivariateKernel::matern32(1.0), unit_rule());
    const Eigen::Vector2d x(0.2, 0.7);
    const double c1 = zk.eval_k0(0.2, 0.2), c2 = zk.eval_k0(0.7, 0.7);
    CHECK(k(x, x) == doctest::Approx(2.5 * (1.0 + c1) * (1.0 + c2)).epsilon(1e-14));
  }

  TEST_CASE("star kernel equals the composed product") {
    const auto k = support::star_kernel(UnivariateKernel::matern32(1.0), 2, unit_rule());
    const ZeroMeanKernel zk(UnivariateKernel::matern32(1.0), unit_rule());
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 30; ++t) {
      const Eigen::Vector2d x(u(rng), u(rng)), y(u(rng), u(rng));
      const double expected = (1.0 + zk.eval_k0(x[0], y[0])) * (1.0 + zk.eval_k0(x[1], y[1]));
      CHECK(k(x, y) == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  TEST_CASE("standard kernel in one dimension") {
    const auto k = AnovaKernel::standard({UnivariateKernel::gaussian(0.5)});
    Eigen::VectorXd x(1), y(1);
    x << 0.3;
    y << 0.9;
    CHECK(k(x, y) == doctest::Approx(1.0 + UnivariateKernel::gaussian(0.5)(0.3, 0.9)));
    CHECK_THROWS_AS(k.centered(0), std::logic_error);
  }

  TEST_CASE("component vectors for a single point") {
    const auto k = support::star_kernel(UnivariateKernel::matern32(1.0), 1, unit_rule());
    Eigen::MatrixXd pts(1, 1);
    pts << 0.4;
    const Design design(pts);
    const auto v = k.component_vectors(design, design.row(0));
    REQUIRE(v.rows() == 1);
    REQUIRE(v.cols() == 1);
    CHECK(v(0, 0) == doctest::Approx(k.centered(0).eval_k0(0.4, 0.4)).epsilon(1e-14));
  }

  TEST_CASE("component vectors rebuild the kernel") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int d = 1; d <= 5; ++d) {
      for (auto base : {UnivariateKernel::matern32(0.5), UnivariateKernel::gaussian(0.3),
                        UnivariateKernel::shifted_brownian()}) {
        for (auto mode : {AnovaMode::star, AnovaMode::standard}) {
          const double scale = 0.5 + u(rng);
          const auto k = mode == AnovaMode::star
                             ? support::star_kernel(base, d, unit_rule(), scale)
                             : AnovaKernel::standard(std::vector<UnivariateKernel>(d, base), scale);
          const auto design = support::random_design(rng, 7, d);
          Eigen::VectorXd x(d);
          for (int i = 0; i < d; ++i) x[i] = u(rng);
          const auto v = k.component_vectors(design, x);
          for (Eigen::Index j = 0; j < design.n(); ++j) {
            double total = 1.0;
            for (auto s : all_nonempty_subsets(d)) {
              double p = 1.0;
              for (int i : s.dims()) p *= v(j, i);
              total += p;
            }
            CHECK(std::abs(total - k(x, design.row(j)) / scale) < 1e-12 * std::max(1.0, std::abs(total)));
          }
        }
      }
    }
  }

  TEST_CASE("component vectors inherit the discrete centering") {
    const auto k = support::star_kernel(UnivariateKernel::gaussian(0.4), 2, unit_rule());
    std::mt19937_64 rng(4);
    const auto design = support::random_design(rng, 6, 2);
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(6);
    for (std::size_t q = 0; q < unit_rule().size(); ++q) {
      const Eigen::Vector2d x(unit_rule().nodes()[q], 0.3);
      mean += unit_rule().weights()[q] * k.component_vectors(design, x).col(0);
    }
    CHECK(mean.cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("gram matches pointwise evaluation and is positive definite") {
    std::mt19937_64 rng(6);
    const auto k = support::star_kernel(UnivariateKernel::matern32(1.0), 3, unit_rule(), 1.7);
    const auto design = support::random_design(rng, 15, 3);
    const auto g = k.gram(design);
    for (Eigen::Index a = 0; a < 15; ++a)
      for (Eigen::Index b = 0; b < 15; ++b)
        CHECK(g(a, b) == doctest::Approx(k(design.row(a), design.row(b))).epsilon(1e-13));
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }

  TEST_CASE("product kernel expansion") {
    std::mt19937_64 rng(8);
    SUBCASE("one brownian dimension") {
      const auto rule = build_rule(Measure::uniform(0.0, 5.0));
      const std::vector<ZeroMeanKernel> zks{ZeroMeanKernel(UnivariateKernel::brownian(), rule)};
      const auto sample = support::random_design(rng, 8, 1, 0.0, 5.0);
      const auto terms = decompose_product_kernel(zks, sample);
      REQUIRE(terms.size() == 2);
      Eigen::MatrixXd k0(8, 8), k1(8, 8);
      for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
          k0(a, b) = support::brownian_k0(sample(a, 0), sample(b, 0), 5.0);
          k1(a, b) = std::min(sample(a, 0), sample(b, 0)) - k0(a, b);
        }
      CHECK(terms[0].k1_dims.empty());
      CHECK(terms[0].frobenius_norm == doctest::Approx(k0.norm()).epsilon(0.02));
      CHECK(terms[1].frobenius_norm == doctest::Approx(k1.norm()).epsilon(0.02));
    }
    SUBCASE("degenerate components leave only the k0 term") {
      const auto rule = build_rule(Measure::uniform(0.0, 1.0));
      const ZeroMeanKernel inner(UnivariateKernel::matern32(1.0), rule);
      const auto centered = UnivariateKernel::custom(
          "k0", [inner](double x, double y) { return inner.eval_k0(x, y); });
      const std::vector<ZeroMeanKernel> zks(2, ZeroMeanKernel(centered, rule));
      const auto terms = decompose_product_kernel(zks, support::random_design(rng, 5, 2));
      REQUIRE(terms.size() == 4);
      CHECK(terms[0].frobenius_norm > 0.0);
      for (int b = 1; b < 4; ++b) CHECK(terms[b].frobenius_norm == 0.0);
    }
    SUBCASE("gaussian x gaussian terms match direct assembly") {
      const auto rule = build_rule(Measure::uniform(0.0, 5.0));
      const ZeroMeanKernel zk(UnivariateKernel::gaussian(1.0), rule);
      const std::vector<ZeroMeanKernel> zks(2, zk);
      const auto sample = support::random_design(rng, 6, 2, 0.0, 5.0);
      const auto terms = decompose_product_kernel(zks, sample);
      for (const auto& t : terms) {
        CHECK(t.frobenius_norm > 0.0);
        Eigen::MatrixXd m(6, 6);
        for (int a = 0; a < 6; ++a)
          for (int b = 0; b < 6; ++b) {
            double p = 1.0;
            for (int i = 0; i < 2; ++i)
              p *= t.k1_dims.contains(i) ? zk.eval_k1(sample(a, i), sample(b, i))
                                         : zk.eval_k0(sample(a, i), sample(b, i));
            m(a, b) = p;
          }
        CHECK(t.frobenius_norm == doctest::Approx(m.norm()).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("argument checks") {
    CHECK_THROWS_AS(AnovaKernel::standard({}), std::invalid_argument);
    CHECK_THROWS_AS(AnovaKernel::standard({UnivariateKernel::matern32()}, 0.0), std::invalid_argument);
    const auto k = support::star_kernel(UnivariateKernel::matern32(1.0), 2, unit_rule());
    CHECK_THROWS_AS(k(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3)), std::invalid_argument);
    CHECK(k.with_scale(3.0).scale() == 3.0);
  }
}
