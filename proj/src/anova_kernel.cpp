#include "zanova/anova_kernel.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace zanova {

AnovaKernel::AnovaKernel(AnovaMode mode, std::vector<UnivariateKernel> bases,
                         std::vector<ZeroMeanKernel> centered, double scale)
    : mode_(mode), bases_(std::move(bases)), centered_(std::move(centered)), scale_(scale) {
  if (bases_.empty()) throw std::invalid_argument("ANOVA kernel needs at least one component");
  if (static_cast<int>(bases_.size()) > kMaxDimension)
    throw std::invalid_argument(fmt::format("ANOVA kernel supports at most {} dimensions", kMaxDimension));
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw std::invalid_argument(fmt::format("ANOVA kernel scale must be positive, got {}", scale));
}

AnovaKernel AnovaKernel::star(std::vector<ZeroMeanKernel> components, double scale) {
  std::vector<UnivariateKernel> bases;
  bases.reserve(components.size());
  for (const auto& c : components) bases.push_back(c.base());
  return AnovaKernel(AnovaMode::star, std::move(bases), std::move(components), scale);
}

AnovaKernel AnovaKernel::standard(std::vector<UnivariateKernel> components, double scale) {
  return AnovaKernel(AnovaMode::standard, std::move(components), {}, scale);
}

AnovaKernel AnovaKernel::with_scale(double scale) const {
  return AnovaKernel(mode_, bases_, centered_, scale);
}

const ZeroMeanKernel& AnovaKernel::centered(int i) const {
  if (mode_ != AnovaMode::star)
    throw std::logic_error("standard ANOVA kernels have no centered components");
  return centered_.at(i);
}

void AnovaKernel::check_dimension(Eigen::Index d) const {
  if (d != dimension())
    throw std::invalid_argument(
        fmt::format("expected {}-dimensional input, got {}", dimension(), d));
}

double AnovaKernel::component(int i, double x, double y) const {
  return mode_ == AnovaMode::star ? centered_.at(i).eval_k0(x, y) : bases_.at(i)(x, y);
}

double AnovaKernel::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
  check_dimension(x.size());
  check_dimension(y.size());
  double prod = scale_;
  for (int i = 0; i < dimension(); ++i) prod *= 1.0 + component(i, x[i], y[i]);
  return prod;
}

DesignRepresenters AnovaKernel::representers(const Design& design) const {
  check_dimension(design.d());
  DesignRepresenters reps;
  if (mode_ != AnovaMode::star) return reps;
  reps.resize(dimension());
  for (int i = 0; i < dimension(); ++i) {
    reps[i].resize(design.n());
    for (Eigen::Index j = 0; j < design.n(); ++j)
      reps[i][j] = centered_[i].representer(design(j, i));
  }
  return reps;
}

Eigen::MatrixXd AnovaKernel::component_vectors(const Design& design,
                                               const Eigen::VectorXd& x) const {
  return component_vectors(design, representers(design), x, Subset::full(dimension()));
}

Eigen::MatrixXd AnovaKernel::component_vectors(const Design& design,
                                               const DesignRepresenters& reps,
                                               const Eigen::VectorXd& x,
                                               Subset which) const {
  check_dimension(design.d());
  check_dimension(x.size());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(design.n(), dimension());
  for (int i = 0; i < dimension(); ++i) {
    if (!which.contains(i)) continue;
    if (mode_ == AnovaMode::star) {
      const auto& zk = centered_[i];
      const double rx = zk.representer(x[i]);
      for (Eigen::Index j = 0; j < design.n(); ++j)
        out(j, i) = zk.eval_k0(x[i], rx, design(j, i), reps[i][j]);
    } else {
      for (Eigen::Index j = 0; j < design.n(); ++j) out(j, i) = bases_[i](x[i], design(j, i));
    }
  }
  return out;
}

Eigen::MatrixXd AnovaKernel::component_gram(const Design& design, const DesignRepresenters& reps,
                                            int i) const {
  const Eigen::Index n = design.n();
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = j; l < n; ++l) {
      c(j, l) = mode_ == AnovaMode::star
                    ? centered_[i].eval_k0(design(j, i), reps[i][j], design(l, i), reps[i][l])
                    : bases_[i](design(j, i), design(l, i));
      c(l, j) = c(j, l);
    }
  }
  return c;
}

Eigen::MatrixXd AnovaKernel::gram(const Design& design) const {
  check_dimension(design.d());
  const auto reps = representers(design);
  Eigen::MatrixXd k = Eigen::MatrixXd::Constant(design.n(), design.n(), scale_);
  for (int i = 0; i < dimension(); ++i)
    k.array() *= 1.0 + component_gram(design, reps, i).array();
  return k;
}

std::vector<ExpansionTerm> decompose_product_kernel(std::span<const ZeroMeanKernel> components,
                                                    const Design& sample) {
  const int d = static_cast<int>(components.size());
  if (d < 1 || d > kMaxExpansionDimension)
    throw std::invalid_argument(
        fmt::format("product kernel expansion needs 1 <= d <= {}, got {}", kMaxExpansionDimension, d));
  if (sample.d() != d)
    throw std::invalid_argument("sample design dimension does not match the kernel");
  const Eigen::Index n = sample.n();

  std::vector<Eigen::MatrixXd> k0(d, Eigen::MatrixXd(n, n));
  std::vector<Eigen::MatrixXd> k1(d, Eigen::MatrixXd(n, n));
  for (int i = 0; i < d; ++i) {
    const auto& zk = components[i];
    Eigen::VectorXd r(n);
    for (Eigen::Index j = 0; j < n; ++j) r[j] = zk.representer(sample(j, i));
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index l = 0; l < n; ++l) {
        k1[i](j, l) = zk.eval_k1_from(r[j], r[l]);
        k0[i](j, l) = zk.base()(sample(j, i), sample(l, i)) - k1[i](j, l);
      }
    }
  }

  std::vector<ExpansionTerm> terms;
  for (std::uint32_t b = 0; b < (1u << d); ++b) {
    const Subset mask(b);
    Eigen::MatrixXd prod = Eigen::MatrixXd::Ones(n, n);
    for (int i = 0; i < d; ++i) prod.array() *= (mask.contains(i) ? k1[i] : k0[i]).array();
    terms.push_back({mask, prod.norm()});
  }
  return terms;
}

}  // namespace zanova
