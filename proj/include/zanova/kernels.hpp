#ifndef ZANOVA_KERNELS_HPP
#define ZANOVA_KERNELS_HPP

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace zanova {

class QuadratureRule;

enum class KernelFamily { brownian, shifted_brownian, gaussian, matern32, custom };

std::string_view family_name(KernelFamily family);
KernelFamily parse_family(std::string_view name);

/// Symmetric positive-definite kernel on an interval of the real line.
///
///   brownian          min(x, y), x, y >= 0
///   shifted_brownian  1 + min(x, y), x, y >= 0
///   gaussian          exp(-((x - y) / theta)^2)
///   matern32          (1 + 2|x - y| / theta) exp(-2|x - y| / theta)
///
/// `custom` wraps a user function which must be symmetric and positive
/// definite; nothing downstream can check that for it.
class UnivariateKernel {
 public:
  using Function = std::function<double(double, double)>;

  static UnivariateKernel brownian();
  static UnivariateKernel shifted_brownian();
  static UnivariateKernel gaussian(double theta = 1.0);
  static UnivariateKernel matern32(double theta = 1.0);
  static UnivariateKernel custom(std::string name, Function fn);

  double operator()(double x, double y) const;
  double eval(double x, double y) const { return (*this)(x, y); }

  KernelFamily family() const { return family_; }
  /// Lengthscale for gaussian and matern32, 0 otherwise.
  double lengthscale() const { return theta_; }
  std::string name() const;

 private:
  UnivariateKernel(KernelFamily family, double theta);

  KernelFamily family_;
  double theta_ = 0.0;
  std::string custom_name_;
  std::shared_ptr<const Function> custom_;
};

/// M(i, j) = k(xs[i], ys[j]). When xs and ys are the same span the
/// upper triangle is mirrored so the result is exactly symmetric.
Eigen::MatrixXd gram(const UnivariateKernel& k, std::span<const double> xs,
                     std::span<const double> ys);

/// Quadrature value of sqrt(k(s, s)); finite means the integral operator
/// is bounded on the kernel's RKHS.
double sqrt_diagonal_integral(const UnivariateKernel& k,
                              const QuadratureRule& rule);

}  // namespace zanova

#endif
