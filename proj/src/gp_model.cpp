#include "zanova/gp_model.hpp"

#include "zanova/error.hpp"

#include <fmt/format.h>

#include <cmath>
#include <stdexcept>

namespace zanova {

namespace {
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-6;
}  // namespace

FittedModel::FittedModel(AnovaKernel kernel, Design design, Eigen::VectorXd observations,
                         double lambda)
    : kernel_(std::move(kernel)),
      design_(std::move(design)),
      observations_(std::move(observations)),
      lambda_(lambda) {}

FittedModel fit(AnovaKernel kernel, Design design, Eigen::VectorXd observations, double lambda) {
  if (design.d() != kernel.dimension())
    throw std::invalid_argument(fmt::format("design has {} columns, kernel has {} dimensions",
                                            design.d(), kernel.dimension()));
  if (observations.size() != design.n())
    throw std::invalid_argument(fmt::format("{} observations for {} design points",
                                            observations.size(), design.n()));
  if (!observations.allFinite()) throw std::invalid_argument("observations contain NaN or inf");
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument(fmt::format("lambda must be non-negative, got {}", lambda));
  if (lambda == 0.0 && design.has_duplicate_rows())
    throw std::invalid_argument("duplicate design rows make the interpolation system singular");

  FittedModel model(std::move(kernel), std::move(design), std::move(observations), lambda);
  model.reps_ = model.kernel_.representers(model.design_);

  Eigen::MatrixXd system = model.kernel_.gram(model.design_);
  system.diagonal().array() += lambda;
  const double mean_diag = system.diagonal().mean();

  Eigen::LLT<Eigen::MatrixXd> llt(system);
  double jitter = 0.0;
  double next = kJitterStart * mean_diag;
  while (llt.info() != Eigen::Success) {
    if (next > kJitterMax * mean_diag * (1.0 + 1e-12)) {
      Eigen::MatrixXd shifted = system;
      shifted.diagonal().array() += jitter;
      const double pivot = Eigen::LDLT<Eigen::MatrixXd>(shifted).vectorD().minCoeff();
      throw NumericalError(fmt::format(
          "Gram matrix is not positive definite even with jitter {:.3g}; smallest pivot {:.6g}",
          jitter, pivot));
    }
    jitter = next;
    next *= 10.0;
    Eigen::MatrixXd shifted = system;
    shifted.diagonal().array() += jitter;
    llt.compute(shifted);
  }
  model.jitter_used_ = jitter;
  model.alpha_ = llt.solve(model.observations_);
  if (!model.alpha_.allFinite()) throw NumericalError("solve produced non-finite coefficients");

  const double fnorm = model.observations_.norm();
  const double rnorm = (system * model.alpha_ - model.observations_).norm();
  model.residual_ = fnorm > 0.0 ? rnorm / fnorm : rnorm;
  return model;
}

double FittedModel::predict(const Eigen::VectorXd& x) const {
  const Eigen::MatrixXd c =
      kernel_.component_vectors(design_, reps_, x, Subset::full(kernel_.dimension()));
  const Eigen::VectorXd kx = kernel_.scale() * (1.0 + c.array()).rowwise().prod();
  return kx.dot(alpha_);
}

double FittedModel::term(Subset subset, const Eigen::VectorXd& x) const {
  if (x.size() != kernel_.dimension())
    throw std::invalid_argument(fmt::format("expected {}-dimensional input, got {}",
                                            kernel_.dimension(), x.size()));
  if (subset.span_dimension() > kernel_.dimension())
    throw std::invalid_argument(fmt::format("subset {{{}}} exceeds dimension {}", subset.label(),
                                            kernel_.dimension()));
  if (subset.empty()) return constant_term();
  const Eigen::MatrixXd c = kernel_.component_vectors(design_, reps_, x, subset);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(design_.n(), kernel_.scale());
  for (int i : subset.dims()) v.array() *= c.col(i).array();
  return v.dot(alpha_);
}

double FittedModel::predict_submodel(Subset subset, const Eigen::VectorXd& x) const {
  if (kernel_.mode() != AnovaMode::star)
    throw std::invalid_argument("ANOVA submodels require a zero-mean (star) kernel");
  return term(subset, x);
}

Eigen::VectorXd FittedModel::predict_submodel_batch(Subset subset, const Eigen::MatrixXd& xs) const {
  Eigen::VectorXd out(xs.rows());
  for (Eigen::Index r = 0; r < xs.rows(); ++r)
    out[r] = predict_submodel(subset, Eigen::VectorXd(xs.row(r).transpose()));
  return out;
}

double FittedModel::predict_candidate_term(Subset subset, const Eigen::VectorXd& x) const {
  return term(subset, x);
}

double FittedModel::constant_term() const { return kernel_.scale() * alpha_.sum(); }

}  // namespace zanova
