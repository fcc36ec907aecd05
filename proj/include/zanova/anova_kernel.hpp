#ifndef ZANOVA_ANOVA_KERNEL_HPP
#define ZANOVA_ANOVA_KERNEL_HPP

#include "zanova/design.hpp"
#include "zanova/kernels.hpp"
#include "zanova/subset.hpp"
#include "zanova/zero_mean.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace zanova {

enum class AnovaMode { star, standard };

/// Per-dimension representers R_i evaluated at the design coordinates
/// X_{j,i}. Empty for standard-mode kernels.
using DesignRepresenters = std::vector<Eigen::VectorXd>;

/// Product kernel over d dimensions,
///
///   star:      scale * prod_i (1 + k0^i(x_i, y_i))
///   standard:  scale * prod_i (1 + k^i(x_i, y_i))
///
/// The scale multiplies the whole product, constant term included.
class AnovaKernel {
 public:
  static AnovaKernel star(std::vector<ZeroMeanKernel> components,
                          double scale = 1.0);
  static AnovaKernel standard(std::vector<UnivariateKernel> components,
                              double scale = 1.0);

  AnovaMode mode() const { return mode_; }
  int dimension() const { return static_cast<int>(bases_.size()); }
  double scale() const { return scale_; }
  AnovaKernel with_scale(double scale) const;

  const UnivariateKernel& base(int i) const { return bases_.at(i); }
  /// Star mode only.
  const ZeroMeanKernel& centered(int i) const;

  /// k0^i(x, y) in star mode, k^i(x, y) in standard mode.
  double component(int i, double x, double y) const;

  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return (*this)(x, y);
  }

  DesignRepresenters representers(const Design& design) const;

  /// n x d matrix whose column i is (component_i(x_i, X_{j,i}))_j.
  Eigen::MatrixXd component_vectors(const Design& design,
                                    const Eigen::VectorXd& x) const;
  /// Same, filling only the columns in `which`; other columns are zero.
  Eigen::MatrixXd component_vectors(const Design& design,
                                    const DesignRepresenters& reps,
                                    const Eigen::VectorXd& x,
                                    Subset which) const;

  /// n x n matrix of per-dimension component values on the design.
  Eigen::MatrixXd component_gram(const Design& design,
                                 const DesignRepresenters& reps, int i) const;

  Eigen::MatrixXd gram(const Design& design) const;

 private:
  AnovaKernel(AnovaMode mode, std::vector<UnivariateKernel> bases,
              std::vector<ZeroMeanKernel> centered, double scale);
  void check_dimension(Eigen::Index d) const;

  AnovaMode mode_;
  std::vector<UnivariateKernel> bases_;
  std::vector<ZeroMeanKernel> centered_;
  double scale_;
};

/// One term of the expansion prod_i (k0^i + k1^i) of a tensor-product
/// kernel: bit i of `k1_dims` selects k1^i, a cleared bit selects k0^i.
struct ExpansionTerm {
  Subset k1_dims;
  double frobenius_norm;
};

/// Frobenius norms of all 2^d expansion terms, Gram-assembled on `sample`,
/// in ascending mask order. Requires d <= 12.
std::vector<ExpansionTerm> decompose_product_kernel(
    std::span<const ZeroMeanKernel> components, const Design& sample);

}  // namespace zanova

#endif
