#include "zanova/testbed.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace zanova {

namespace {

constexpr long long kDoeBudget = 10'000'000;  // n * restarts

void check_doe(const DoeSpec& spec) {
  if (spec.n < 2) throw std::invalid_argument(fmt::format("LHS needs n >= 2, got {}", spec.n));
  if (spec.lower.empty() || spec.lower.size() != spec.upper.size())
    throw std::invalid_argument("LHS bounds must be nonempty and of equal length");
  if (spec.dimension() > kMaxDimension)
    throw std::invalid_argument(fmt::format("LHS supports at most {} dimensions", kMaxDimension));
  for (std::size_t i = 0; i < spec.lower.size(); ++i) {
    if (!std::isfinite(spec.lower[i]) || !std::isfinite(spec.upper[i]) ||
        !(spec.lower[i] < spec.upper[i]))
      throw std::invalid_argument(fmt::format("invalid LHS bounds [{}, {}] in dimension {}",
                                              spec.lower[i], spec.upper[i], i + 1));
  }
  if (spec.restarts < 1) throw std::invalid_argument("LHS needs at least one restart");
  if (static_cast<long long>(spec.n) * spec.restarts > kDoeBudget)
    throw std::invalid_argument(
        fmt::format("LHS budget exceeded: n * restarts = {} > {}",
                    static_cast<long long>(spec.n) * spec.restarts, kDoeBudget));
}

Eigen::MatrixXd draw_lhs(const DoeSpec& spec, std::mt19937_64& rng) {
  const int n = spec.n;
  const int d = spec.dimension();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<int> perm(n);
  Eigen::MatrixXd pts(n, d);
  for (int i = 0; i < d; ++i) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const double width = spec.upper[i] - spec.lower[i];
    for (int j = 0; j < n; ++j) {
      const double u = (perm[j] + unit(rng)) / n;
      pts(j, i) = std::min(spec.lower[i] + u * width, spec.upper[i]);
    }
  }
  return pts;
}

double min_distance(const Eigen::MatrixXd& pts) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < pts.rows(); ++a)
    for (Eigen::Index b = a + 1; b < pts.rows(); ++b)
      best = std::min(best, (pts.row(a) - pts.row(b)).squaredNorm());
  return std::sqrt(best);
}

}  // namespace

TestFunction::TestFunction(Kind kind, int dimension, std::vector<double> a)
    : kind_(kind), dimension_(dimension), a_(std::move(a)) {}

TestFunction TestFunction::g_function(std::vector<double> a) {
  if (a.empty()) throw std::invalid_argument("g-function needs at least one coefficient");
  for (double ak : a)
    if (!(ak > 0.0) || !std::isfinite(ak))
      throw std::invalid_argument(fmt::format("g-function coefficients must be > 0, got {}", ak));
  const int d = static_cast<int>(a.size());
  return TestFunction(Kind::g_function, d, std::move(a));
}

TestFunction TestFunction::quadratic() { return TestFunction(Kind::quadratic, 2, {}); }

double TestFunction::operator()(const Eigen::VectorXd& x) const {
  if (x.size() != dimension_)
    throw std::invalid_argument(
        fmt::format("test function expects {} inputs, got {}", dimension_, x.size()));
  switch (kind_) {
    case Kind::g_function: {
      double prod = 1.0;
      for (int k = 0; k < dimension_; ++k)
        prod *= (std::abs(4.0 * x[k] - 2.0) + a_[k]) / (1.0 + a_[k]);
      return prod;
    }
    case Kind::quadratic:
      return x[0] + x[1] * x[1] + x[0] * x[1];
  }
  return 0.0;
}

Eigen::VectorXd TestFunction::evaluate(const Design& design) const {
  Eigen::VectorXd f(design.n());
  for (Eigen::Index j = 0; j < design.n(); ++j) f[j] = (*this)(design.row(j));
  return f;
}

double g_analytic_index(Subset subset, const std::vector<double>& a) {
  if (subset.empty()) throw std::invalid_argument("analytic index needs a nonempty subset");
  const int d = static_cast<int>(a.size());
  if (subset.span_dimension() > d)
    throw std::invalid_argument(fmt::format("subset {{{}}} exceeds dimension {}", subset.label(), d));
  auto partial = [&](int k) { return 1.0 / (3.0 * (1.0 + a[k]) * (1.0 + a[k])); };
  double num = 1.0;
  for (int i : subset.dims()) num *= partial(i);
  double den = 1.0;
  for (int k = 0; k < d; ++k) den *= 1.0 + partial(k);
  return num / (den - 1.0);
}

double quadratic_analytic_term(Subset subset, const Eigen::VectorXd& x) {
  switch (subset.bits()) {
    case 0b00: return 1.0;
    case 0b01: return x[0];
    case 0b10: return x[1] * x[1] - 1.0;
    case 0b11: return x[0] * x[1];
    default:
      throw std::invalid_argument(
          fmt::format("quadratic test function has no term {{{}}}", subset.label()));
  }
}

Design lhs_maximin(const DoeSpec& spec) {
  check_doe(spec);
  std::mt19937_64 rng(spec.seed);
  Eigen::MatrixXd best;
  double best_dist = -1.0;
  for (int r = 0; r < spec.restarts; ++r) {
    Eigen::MatrixXd pts = draw_lhs(spec, rng);
    const double dist = min_distance(pts);
    if (dist > best_dist) {
      best_dist = dist;
      best = std::move(pts);
    }
  }
  return Design(std::move(best));
}

Design lhs_random(const DoeSpec& spec, std::uint64_t rng_seed) {
  DoeSpec single = spec;
  single.restarts = 1;
  check_doe(single);
  std::mt19937_64 rng(rng_seed);
  return Design(draw_lhs(single, rng));
}

double min_pairwise_distance(const Design& design) { return min_distance(design.points()); }

Eigen::VectorXd add_noise(const Eigen::VectorXd& values, double variance, std::uint64_t seed) {
  if (!(variance >= 0.0) || !std::isfinite(variance))
    throw std::invalid_argument(fmt::format("noise variance must be >= 0, got {}", variance));
  if (variance == 0.0) return values;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double sd = std::sqrt(variance);
  Eigen::VectorXd out = values;
  for (Eigen::Index j = 0; j < out.size(); ++j) out[j] += sd * z(rng);
  return out;
}

}  // namespace zanova
