#ifndef ZANOVA_ZERO_MEAN_HPP
#define ZANOVA_ZERO_MEAN_HPP

#include "zanova/kernels.hpp"
#include "zanova/quadrature.hpp"

#include <span>
#include <vector>

namespace zanova {

/// Splits a kernel k into k0 + k1 against the discrete measure of a
/// quadrature rule.
///
/// With R(x) = sum_j w_j k(x, x_j) and D = sum_j w_j R(x_j),
///
///   k1(x, y) = R(x) R(y) / D,    k0 = k - k1.
///
/// k0 reproduces the functions with zero mean under the rule, so
/// sum_j w_j k0(x, x_j) vanishes for every x, and it stays positive
/// semi-definite because the rule is a genuine (discrete) measure.
/// When D is negligible the kernel is already centered: k1 is zero.
class ZeroMeanKernel {
 public:
  ZeroMeanKernel(UnivariateKernel base, QuadratureRule rule);

  const UnivariateKernel& base() const { return base_; }
  const QuadratureRule& rule() const { return rule_; }
  std::span<const double> representer_at_nodes() const { return r_at_nodes_; }
  double denominator() const { return denom_; }
  bool degenerate() const { return degenerate_; }

  /// R(x); O(number of nodes).
  double representer(double x) const;

  double eval_k0(double x, double y) const;
  double eval_k1(double x, double y) const;

  // Variants taking precomputed representers rx = R(x), ry = R(y).
  double eval_k0(double x, double rx, double y, double ry) const {
    return base_(x, y) - eval_k1_from(rx, ry);
  }
  double eval_k1_from(double rx, double ry) const {
    return degenerate_ ? 0.0 : rx * ry / denom_;
  }

 private:
  UnivariateKernel base_;
  QuadratureRule rule_;
  std::vector<double> r_at_nodes_;
  double denom_ = 0.0;
  bool degenerate_ = false;
};

inline ZeroMeanKernel decompose(UnivariateKernel base, QuadratureRule rule) {
  return ZeroMeanKernel(std::move(base), std::move(rule));
}

}  // namespace zanova

#endif
