#ifndef ZANOVA_SOBOL_HPP
#define ZANOVA_SOBOL_HPP

#include "zanova/gp_model.hpp"
#include "zanova/subset.hpp"

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace zanova {

/// Gamma_i = sum_q w_q k0^i(node_q) k0^i(node_q)^T, where k0^i(x) is the
/// vector (k0^i(x, X_{j,i}))_j, computed with the same rule used to
/// center dimension i.
struct GammaSet {
  std::vector<Eigen::MatrixXd> gammas;
};

GammaSet compute_gammas(const FittedModel& model);

/// Variance of m_I: scale^2 alpha^T (Gamma_i1 .* Gamma_i2 ...) alpha.
double submodel_variance(const FittedModel& model, const GammaSet& gammas,
                         Subset subset);

/// Variance of m: scale^2 alpha^T (prod_i (1 + Gamma_i) - 1) alpha with
/// elementwise products.
double total_model_variance(const FittedModel& model, const GammaSet& gammas);

struct SobolOptions {
  /// Enumerate every nonempty subset of order <= max_order ...
  int max_order = 3;
  /// ... or all 2^d - 1 of them (d <= 12).
  bool all_subsets = false;
  /// Always reported, whatever their order.
  std::vector<Subset> extra;
};

struct SensitivityReport {
  double total_variance = 0.0;
  std::map<Subset, double> indices;
  /// 1 - sum of the reported indices.
  double residual_mass = 0.0;
  /// Indices in [-1e-10, 0) that were clipped to 0.
  int clipped = 0;

  double index(Subset subset) const { return indices.at(subset); }
};

/// S_I = Var(m_I) / Var(m). Throws NumericalError when the model is
/// (numerically) constant or when an index falls below -1e-10.
SensitivityReport sobol_indices(const FittedModel& model,
                                const SobolOptions& options = {});
SensitivityReport sobol_indices(const FittedModel& model,
                                const GammaSet& gammas,
                                const SobolOptions& options = {});

/// {"total_variance": v, "indices": {"1": s, "1,2": s, ...},
///  "residual_mass": r, "clipped": c}
std::string report_json(const SensitivityReport& report);
/// "subset,index" header then one row per subset, ascending mask order.
std::string report_csv(const SensitivityReport& report);

}  // namespace zanova

#endif
