#ifndef ZANOVA_GP_MODEL_HPP
#define ZANOVA_GP_MODEL_HPP

#include "zanova/anova_kernel.hpp"
#include "zanova/design.hpp"
#include "zanova/subset.hpp"

#include <Eigen/Dense>

namespace zanova {

/// Best predictor m(x) = k(x)^T (K + lambda I)^{-1} F for an ANOVA kernel.
/// lambda = 0 is the minimum-norm interpolant. Immutable after fit().
class FittedModel {
 public:
  const AnovaKernel& kernel() const { return kernel_; }
  const Design& design() const { return design_; }
  const Eigen::VectorXd& observations() const { return observations_; }
  double lambda() const { return lambda_; }
  /// (K + lambda I)^{-1} F.
  const Eigen::VectorXd& alpha() const { return alpha_; }
  /// Diagonal shift added to reach a successful factorization (0 if none).
  double jitter_used() const { return jitter_used_; }
  /// ||(K + lambda I) alpha - F|| / ||F|| against the unjittered system.
  double relative_residual() const { return residual_; }
  const DesignRepresenters& design_representers() const { return reps_; }

  double predict(const Eigen::VectorXd& x) const;

  /// Term m_I of the functional ANOVA representation. Star mode only;
  /// the empty set gives the constant m_0.
  double predict_submodel(Subset subset, const Eigen::VectorXd& x) const;
  /// Batch variant: one row of `xs` per evaluation point.
  Eigen::VectorXd predict_submodel_batch(Subset subset, const Eigen::MatrixXd& xs) const;

  /// scale * (prod_{i in I} k^i(x_i))^T alpha for any mode. In standard
  /// mode these terms sum to m but are not its ANOVA terms.
  double predict_candidate_term(Subset subset, const Eigen::VectorXd& x) const;

  double constant_term() const;

 private:
  friend FittedModel fit(AnovaKernel kernel, Design design,
                         Eigen::VectorXd observations, double lambda);

  FittedModel(AnovaKernel kernel, Design design, Eigen::VectorXd observations,
              double lambda);
  double term(Subset subset, const Eigen::VectorXd& x) const;

  AnovaKernel kernel_;
  Design design_;
  Eigen::VectorXd observations_;
  double lambda_;
  DesignRepresenters reps_;
  Eigen::VectorXd alpha_;
  double jitter_used_ = 0.0;
  double residual_ = 0.0;
};

/// Assembles K, factorizes K + lambda I by Cholesky and solves for alpha.
/// A failed factorization is retried with a diagonal jitter of 1e-10 times
/// the mean diagonal, growing tenfold up to 1e-6; past that a
/// NumericalError is thrown. Duplicate design rows are rejected when
/// lambda = 0.
FittedModel fit(AnovaKernel kernel, Design design, Eigen::VectorXd observations,
                double lambda = 0.0);

}  // namespace zanova

#endif
