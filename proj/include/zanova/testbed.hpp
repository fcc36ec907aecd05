#ifndef ZANOVA_TESTBED_HPP
#define ZANOVA_TESTBED_HPP

#include "zanova/design.hpp"
#include "zanova/subset.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace zanova {

/// Sobol g-function prod_k (|4 x_k - 2| + a_k) / (1 + a_k) on [0,1]^d, or
/// the quadratic x1 + x2^2 + x1 x2 on R^2.
class TestFunction {
 public:
  enum class Kind { g_function, quadratic };

  static TestFunction g_function(std::vector<double> a);
  static TestFunction quadratic();

  Kind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const std::vector<double>& coefficients() const { return a_; }

  double operator()(const Eigen::VectorXd& x) const;
  Eigen::VectorXd evaluate(const Design& design) const;

 private:
  TestFunction(Kind kind, int dimension, std::vector<double> a);

  Kind kind_;
  int dimension_;
  std::vector<double> a_;
};

/// Closed-form Sobol index of the g-function for a nonempty subset.
double g_analytic_index(Subset subset, const std::vector<double>& a);

/// ANOVA terms of the quadratic under independent standard normals:
/// f0 = 1, f1 = x1, f2 = x2^2 - 1, f12 = x1 x2. Coordinates outside the
/// subset are ignored.
double quadratic_analytic_term(Subset subset, const Eigen::VectorXd& x);

struct DoeSpec {
  int n = 20;
  std::vector<double> lower;
  std::vector<double> upper;
  std::uint64_t seed = 0;
  int restarts = 100;

  int dimension() const { return static_cast<int>(lower.size()); }
};

/// Latin hypercube with uniform jitter inside each stratum; the best of
/// `restarts` draws by minimal pairwise distance is kept. Deterministic
/// for a given seed.
Design lhs_maximin(const DoeSpec& spec);

/// One plain Latin hypercube draw from `rng_seed`.
Design lhs_random(const DoeSpec& spec, std::uint64_t rng_seed);

double min_pairwise_distance(const Design& design);

/// F + sqrt(variance) z with z iid standard normal. variance = 0 returns F.
Eigen::VectorXd add_noise(const Eigen::VectorXd& values, double variance,
                          std::uint64_t seed);

}  // namespace zanova

#endif
