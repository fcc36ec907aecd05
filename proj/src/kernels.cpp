#include "zanova/kernels.hpp"

#include "zanova/quadrature.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace zanova {

std::string_view family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::brownian: return "brownian";
    case KernelFamily::shifted_brownian: return "shifted-brownian";
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::matern32: return "matern32";
    case KernelFamily::custom: return "custom";
  }
  return "?";
}

KernelFamily parse_family(std::string_view name) {
  for (auto f : {KernelFamily::brownian, KernelFamily::shifted_brownian,
                 KernelFamily::gaussian, KernelFamily::matern32}) {
    if (family_name(f) == name) return f;
  }
  throw std::invalid_argument(fmt::format("unknown kernel family '{}'", name));
}

UnivariateKernel::UnivariateKernel(KernelFamily family, double theta)
    : family_(family), theta_(theta) {
  if ((family == KernelFamily::gaussian || family == KernelFamily::matern32) &&
      !(theta > 0.0 && std::isfinite(theta)))
    throw std::invalid_argument(fmt::format("kernel lengthscale must be positive, got {}", theta));
}

UnivariateKernel UnivariateKernel::brownian() { return {KernelFamily::brownian, 0.0}; }

UnivariateKernel UnivariateKernel::shifted_brownian() {
  return {KernelFamily::shifted_brownian, 0.0};
}

UnivariateKernel UnivariateKernel::gaussian(double theta) {
  return {KernelFamily::gaussian, theta};
}

UnivariateKernel UnivariateKernel::matern32(double theta) {
  return {KernelFamily::matern32, theta};
}

UnivariateKernel UnivariateKernel::custom(std::string name, Function fn) {
  if (!fn) throw std::invalid_argument("custom kernel needs a function");
  UnivariateKernel k(KernelFamily::custom, 0.0);
  k.custom_name_ = std::move(name);
  k.custom_ = std::make_shared<const Function>(std::move(fn));
  return k;
}

std::string UnivariateKernel::name() const {
  if (family_ == KernelFamily::custom) return custom_name_;
  return std::string(family_name(family_));
}

double UnivariateKernel::operator()(double x, double y) const {
  switch (family_) {
    case KernelFamily::brownian:
    case KernelFamily::shifted_brownian: {
      if (x < 0.0 || y < 0.0)
        throw std::invalid_argument(
            fmt::format("brownian kernel is defined on x, y >= 0, got ({}, {})", x, y));
      const double m = std::min(x, y);
      return family_ == KernelFamily::brownian ? m : 1.0 + m;
    }
    case KernelFamily::gaussian: {
      const double r = (x - y) / theta_;
      return std::exp(-r * r);
    }
    case KernelFamily::matern32: {
      const double r = 2.0 * std::abs(x - y) / theta_;
      return (1.0 + r) * std::exp(-r);
    }
    case KernelFamily::custom:
      return (*custom_)(x, y);
  }
  return 0.0;
}

Eigen::MatrixXd gram(const UnivariateKernel& k, std::span<const double> xs,
                     std::span<const double> ys) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  const auto m = static_cast<Eigen::Index>(ys.size());
  Eigen::MatrixXd out(n, m);
  const bool same = xs.data() == ys.data() && n == m;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = same ? i : 0; j < m; ++j) {
      out(i, j) = k(xs[i], ys[j]);
      if (same) out(j, i) = out(i, j);
    }
  }
  return out;
}

double sqrt_diagonal_integral(const UnivariateKernel& k, const QuadratureRule& rule) {
  return integrate(rule, [&](double s) { return std::sqrt(k(s, s)); });
}

}  // namespace zanova
