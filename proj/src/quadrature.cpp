#include "zanova/quadrature.hpp"

#include "zanova/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace zanova {

std::string_view measure_kind_name(MeasureKind kind) {
  switch (kind) {
    case MeasureKind::uniform: return "uniform";
    case MeasureKind::standard_normal: return "normal";
  }
  return "?";
}

Measure::Measure(MeasureKind kind, double a, double b) : kind_(kind), a_(a), b_(b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw std::invalid_argument("measure bounds must be finite");
  if (!(a < b))
    throw std::invalid_argument(fmt::format("measure support [{}, {}] is empty", a, b));
}

Measure Measure::uniform(double a, double b) {
  return Measure(MeasureKind::uniform, a, b);
}

Measure Measure::standard_normal(double a, double b) {
  return Measure(MeasureKind::standard_normal, a, b);
}

QuadratureRule::QuadratureRule(std::vector<double> nodes, std::vector<double> weights,
                               double lower, double upper)
    : nodes_(std::move(nodes)), weights_(std::move(weights)), lower_(lower), upper_(upper) {
  if (nodes_.empty() || nodes_.size() != weights_.size())
    throw std::invalid_argument("quadrature rule needs matching nonempty nodes and weights");
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    if (!(weights_[j] > 0.0) || !std::isfinite(weights_[j]))
      throw std::invalid_argument("quadrature weights must be positive");
    if (!contains(nodes_[j]))
      throw std::invalid_argument("quadrature node outside the support");
    if (j > 0 && !(nodes_[j] > nodes_[j - 1]))
      throw std::invalid_argument("quadrature nodes must be strictly increasing");
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument(fmt::format("quadrature weights sum to {}, not 1", total));
}

QuadratureRule build_rule(const Measure& measure, int n_nodes) {
  if (n_nodes < 2)
    throw std::invalid_argument(fmt::format("need at least 2 quadrature nodes, got {}", n_nodes));
  const double a = measure.lower();
  const double b = measure.upper();
  const double h = (b - a) / n_nodes;
  std::vector<double> nodes(n_nodes);
  std::vector<double> weights(n_nodes);
  for (int j = 0; j < n_nodes; ++j) nodes[j] = a + (j + 0.5) * h;

  switch (measure.kind()) {
    case MeasureKind::uniform:
      std::fill(weights.begin(), weights.end(), 1.0 / n_nodes);
      break;
    case MeasureKind::standard_normal: {
      // The 1/sqrt(2 pi) factor cancels in the renormalization.
      for (int j = 0; j < n_nodes; ++j) weights[j] = std::exp(-0.5 * nodes[j] * nodes[j]);
      const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
      if (!(total > 0.0))
        throw std::invalid_argument("normal truncation window carries no mass");
      for (double& w : weights) w /= total;
      break;
    }
  }
  return QuadratureRule(std::move(nodes), std::move(weights), a, b);
}

double integrate(const QuadratureRule& rule, const std::function<double(double)>& f) {
  const auto nodes = rule.nodes();
  const auto weights = rule.weights();
  double sum = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double v = f(nodes[j]);
    if (!std::isfinite(v))
      throw NumericalError(fmt::format("integrand is not finite at node {}", nodes[j]));
    sum += weights[j] * v;
  }
  return sum;
}

}  // namespace zanova
