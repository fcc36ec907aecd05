#include "zanova/zero_mean.hpp"

#include "zanova/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace zanova {

namespace {
constexpr double kDegenerateRelative = 1e-14;
}

ZeroMeanKernel::ZeroMeanKernel(UnivariateKernel base, QuadratureRule rule)
    : base_(std::move(base)), rule_(std::move(rule)) {
  const auto nodes = rule_.nodes();
  const auto weights = rule_.weights();
  r_at_nodes_.resize(nodes.size());
  double max_diag = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    r_at_nodes_[j] = representer(nodes[j]);
    const double diag = base_(nodes[j], nodes[j]);
    if (!std::isfinite(r_at_nodes_[j]) || !std::isfinite(diag))
      throw NumericalError(
          fmt::format("kernel '{}' is not finite on the node grid", base_.name()));
    max_diag = std::max(max_diag, std::abs(diag));
  }
  double denom = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) denom += weights[j] * r_at_nodes_[j];
  degenerate_ = denom <= kDegenerateRelative * max_diag;
  denom_ = degenerate_ ? std::max(denom, 0.0) : denom;
}

double ZeroMeanKernel::representer(double x) const {
  const auto nodes = rule_.nodes();
  const auto weights = rule_.weights();
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) sum += weights[j] * base_(x, nodes[j]);
  return sum;
}

double ZeroMeanKernel::eval_k1(double x, double y) const {
  if (degenerate_) return 0.0;
  return eval_k1_from(representer(x), representer(y));
}

double ZeroMeanKernel::eval_k0(double x, double y) const {
  if (degenerate_) return base_(x, y);
  return eval_k0(x, representer(x), y, representer(y));
}

}  // namespace zanova
