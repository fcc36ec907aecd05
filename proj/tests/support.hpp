#ifndef ZANOVA_TESTS_SUPPORT_HPP
#define ZANOVA_TESTS_SUPPORT_HPP

#include "zanova/anova_kernel.hpp"
#include "zanova/design.hpp"
#include "zanova/kernels.hpp"
#include "zanova/quadrature.hpp"
#include "zanova/zero_mean.hpp"

#include <Eigen/Dense>

#include <random>
#include <vector>

namespace support {

// Analytic brownian pieces on uniform [0, L].
inline double brownian_r(double x, double L) { return x - x * x / (2.0 * L); }
inline double brownian_denom(double L) { return L / 3.0; }
inline double brownian_k0(double x, double y, double L) {
  return std::min(x, y) - brownian_r(x, L) * brownian_r(y, L) / brownian_denom(L);
}

inline std::vector<zanova::UnivariateKernel> catalog() {
  using zanova::UnivariateKernel;
  return {UnivariateKernel::brownian(), UnivariateKernel::shifted_brownian(),
          UnivariateKernel::gaussian(1.0), UnivariateKernel::matern32(1.0)};
}

inline bool needs_nonnegative(const zanova::UnivariateKernel& k) {
  return k.family() == zanova::KernelFamily::brownian ||
         k.family() == zanova::KernelFamily::shifted_brownian;
}

// Rules a kernel can live on: one uniform, one normal.
inline std::vector<zanova::QuadratureRule> rules_for(const zanova::UnivariateKernel& k) {
  using zanova::Measure;
  if (needs_nonnegative(k))
    return {zanova::build_rule(Measure::uniform(0.0, 5.0)),
            zanova::build_rule(Measure::standard_normal(0.0, 8.0))};
  return {zanova::build_rule(Measure::uniform(0.0, 5.0)),
          zanova::build_rule(Measure::standard_normal())};
}

inline zanova::Design random_design(std::mt19937_64& rng, int n, int d, double lo = 0.0,
                                    double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd pts(n, d);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < d; ++i) pts(j, i) = u(rng);
  return zanova::Design(pts);
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> z;
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) v[j] = z(rng);
  return v;
}

inline zanova::AnovaKernel star_kernel(const zanova::UnivariateKernel& k, int d,
                                       const zanova::QuadratureRule& rule, double scale = 1.0) {
  std::vector<zanova::ZeroMeanKernel> zks(d, zanova::ZeroMeanKernel(k, rule));
  return zanova::AnovaKernel::star(std::move(zks), scale);
}

}  // namespace support

#endif
