#include "zanova/oracle.hpp"
#include "zanova/testbed.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace zanova;
using namespace zanova::oracle;

namespace {
std::vector<QuadratureRule> normal_rules(int d, int nodes = 100) {
  return std::vector<QuadratureRule>(d, build_rule(Measure::standard_normal(), nodes));
}

std::vector<QuadratureRule> unit_rules(int d, int nodes = 100) {
  return std::vector<QuadratureRule>(d, build_rule(Measure::uniform(0.0, 1.0), nodes));
}

double quadratic(const Eigen::VectorXd& x) { return x[0] + x[1] * x[1] + x[0] * x[1]; }

// Largest weighted mean of g along coordinate `axis`, over all settings of the others.
double max_axis_mean(const GridFunction& g, int axis) {
  std::vector<std::size_t> sizes;
  for (const auto& r : g.rules) sizes.push_back(r.size());
  std::vector<double> sums(g.point_count() / sizes[axis], 0.0);
  for (std::size_t p = 0; p < g.point_count(); ++p) {
    std::size_t rest = p, key = 0, stride = 1, along = 0;
    for (int i = g.dimension() - 1; i >= 0; --i) {
      const std::size_t idx = rest % sizes[i];
      rest /= sizes[i];
      if (i == axis) {
        along = idx;
      } else {
        key += idx * stride;
        stride *= sizes[i];
      }
    }
    sums[key] += g.rules[axis].weights()[along] * g.values[p];
  }
  double worst = 0.0;
  for (double s : sums) worst = std::max(worst, std::abs(s));
  return worst;
}
}  // namespace

TEST_SUITE("oracle") {
  TEST_CASE("constant projection") {
    const auto c = tabulate(unit_rules(2, 10), [](const Eigen::VectorXd&) { return 2.5; });
    CHECK(project_constant(c) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(std::abs(project_constant(tabulate(normal_rules(2), quadratic)) - 1.0) < 1e-6);
    const auto g = TestFunction::g_function({1.0, 2.0});
    CHECK(std::abs(project_constant(tabulate(unit_rules(2), [&](const Eigen::VectorXd& x) { return g(x); })) - 1.0) <
          2e-3);
  }

  TEST_CASE("main effects of the quadratic test") {
    const auto grid = tabulate(normal_rules(2), quadratic);
    const auto f1 = project_main_effect(grid, 0);
    const auto f2 = project_main_effect(grid, 1);
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t q = 0; q < f1.values.size(); ++q) {
      const double x = f1.rules[0].nodes()[q];
      d1 = std::max(d1, std::abs(f1.values[q] - x));
      d2 = std::max(d2, std::abs(f2.values[q] - (x * x - 1.0)));
    }
    CHECK(d1 < 1e-6);
    CHECK(d2 < 1e-6);
    const auto c = tabulate(unit_rules(2, 10), [](const Eigen::VectorXd&) { return -1.0; });
    for (double v : project_main_effect(c, 1).values) CHECK(std::abs(v) < 1e-15);
  }

  TEST_CASE("interactions") {
    const auto grid = tabulate(normal_rules(2), quadratic);
    const auto f12 = project_interaction(grid, Subset::of({0, 1}));
    double dev = 0.0;
    for (std::size_t p = 0; p < f12.point_count(); ++p) {
      const auto x = f12.point(p);
      dev = std::max(dev, std::abs(f12.values[p] - x[0] * x[1]));
    }
    CHECK(dev < 1e-6);

    const auto additive = tabulate(unit_rules(2, 30), [](const Eigen::VectorXd& x) {
      return std::sin(3.0 * x[0]) + std::exp(x[1]);
    });
    for (double v : project_interaction(additive, Subset::of({0, 1})).values) CHECK(std::abs(v) < 1e-10);
    CHECK_THROWS_AS(project_interaction(additive, Subset::of({0})), std::invalid_argument);
  }

  TEST_CASE("variances") {
    const auto c = tabulate(unit_rules(2, 10), [](const Eigen::VectorXd&) { return 7.0; });
    CHECK(grid_variance(c) < 1e-20);
    const auto grid = tabulate(normal_rules(2), quadratic);
    CHECK(std::abs(grid_variance(grid) - 4.0) < 1e-6);
    double parts = 0.0;
    for (auto s : all_nonempty_subsets(2)) parts += grid_variance(project(grid, s));
    CHECK(std::abs(parts - grid_variance(grid)) < 1e-8);
  }

  TEST_CASE("three-dimensional decomposition is complete, centered and orthogonal") {
    const auto rules = unit_rules(3, 12);
    const auto grid = tabulate(rules, [](const Eigen::VectorXd& x) {
      return std::exp(x[0] * x[1]) + std::cos(x[2] + x[0]) * x[1] + x[2] * x[2] * x[0] * x[1];
    });
    std::vector<GridFunction> terms;
    std::vector<Subset> subsets{Subset()};
    for (auto s : all_nonempty_subsets(3)) subsets.push_back(s);
    for (auto s : subsets) terms.push_back(expand(project(grid, s), s, rules));

    double rebuild = 0.0;
    for (std::size_t p = 0; p < grid.point_count(); ++p) {
      double sum = 0.0;
      for (const auto& t : terms) sum += t.values[p];
      rebuild = std::max(rebuild, std::abs(sum - grid.values[p]));
    }
    CHECK(rebuild < 1e-10);

    for (std::size_t k = 1; k < subsets.size(); ++k) {
      const auto local = project(grid, subsets[k]);
      for (int i = 0; i < local.dimension(); ++i) CHECK(max_axis_mean(local, i) < 1e-10);
    }
    for (std::size_t a = 0; a < terms.size(); ++a)
      for (std::size_t b = a + 1; b < terms.size(); ++b) {
        const double na = std::sqrt(grid_inner(terms[a], terms[a]));
        const double nb = std::sqrt(grid_inner(terms[b], terms[b]));
        CHECK(std::abs(grid_inner(terms[a], terms[b])) <= 1e-10 * std::max(1.0, na * nb));
      }
  }

  TEST_CASE("grid bookkeeping") {
    const auto rules = unit_rules(2, 4);
    const auto grid = tabulate(rules, [](const Eigen::VectorXd& x) { return 10.0 * x[0] + x[1]; });
    CHECK(grid.point_count() == 16);
    // Last coordinate runs fastest.
    CHECK(grid.point(1)[0] == grid.point(0)[0]);
    CHECK(grid.point(1)[1] > grid.point(0)[1]);
    CHECK(grid.weight(5) == doctest::Approx(1.0 / 16.0));
    CHECK_THROWS_AS(tabulate(unit_rules(4, 3), [](const Eigen::VectorXd&) { return 0.0; }), std::invalid_argument);
  }
}
