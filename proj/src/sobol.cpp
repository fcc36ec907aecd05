#include "zanova/sobol.hpp"

#include "zanova/error.hpp"

#include <fmt/format.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace zanova {

namespace {

constexpr double kClipTolerance = 1e-10;
constexpr double kDegenerateVariance = 1e-14;

void require_star(const FittedModel& model) {
  if (model.kernel().mode() != AnovaMode::star)
    throw std::invalid_argument("sensitivity indices require a zero-mean (star) kernel");
}

void check_gammas(const FittedModel& model, const GammaSet& gammas) {
  if (static_cast<int>(gammas.gammas.size()) != model.kernel().dimension())
    throw std::invalid_argument("gamma set does not match the model dimension");
}

}  // namespace

GammaSet compute_gammas(const FittedModel& model) {
  require_star(model);
  const auto& kernel = model.kernel();
  const auto& design = model.design();
  const auto& reps = model.design_representers();
  const Eigen::Index n = design.n();

  GammaSet out;
  for (int i = 0; i < kernel.dimension(); ++i) {
    const auto& zk = kernel.centered(i);
    const auto nodes = zk.rule().nodes();
    const auto weights = zk.rule().weights();
    const auto r_nodes = zk.representer_at_nodes();
    const auto q = static_cast<Eigen::Index>(nodes.size());
    // Row q holds sqrt(w_q) k0(node_q, X_{., i}); Gamma = P^T P.
    Eigen::MatrixXd p(q, n);
    for (Eigen::Index a = 0; a < q; ++a) {
      const double sw = std::sqrt(weights[a]);
      for (Eigen::Index j = 0; j < n; ++j)
        p(a, j) = sw * zk.eval_k0(nodes[a], r_nodes[a], design(j, i), reps[i][j]);
    }
    Eigen::MatrixXd gamma(n, n);
    gamma.setZero();
    gamma.selfadjointView<Eigen::Lower>().rankUpdate(p.transpose());
    gamma.triangularView<Eigen::StrictlyUpper>() = gamma.transpose();
    out.gammas.push_back(std::move(gamma));
  }
  return out;
}

double submodel_variance(const FittedModel& model, const GammaSet& gammas, Subset subset) {
  require_star(model);
  check_gammas(model, gammas);
  if (subset.empty())
    throw std::invalid_argument("submodel variance is defined for nonempty subsets only");
  if (subset.span_dimension() > model.kernel().dimension())
    throw std::invalid_argument(fmt::format("subset {{{}}} exceeds the model dimension", subset.label()));
  const Eigen::Index n = model.design().n();
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(n, n);
  for (int i : subset.dims()) m.array() *= gammas.gammas[i].array();
  const double s2 = model.kernel().scale() * model.kernel().scale();
  return s2 * model.alpha().dot(m * model.alpha());
}

double total_model_variance(const FittedModel& model, const GammaSet& gammas) {
  require_star(model);
  check_gammas(model, gammas);
  const Eigen::Index n = model.design().n();
  // prod(1 + G_i) - 1 accumulated as M <- M + G + M * G, never forming 1 + G.
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const auto& g : gammas.gammas) m.array() += g.array() + m.array() * g.array();
  const double s2 = model.kernel().scale() * model.kernel().scale();
  return s2 * model.alpha().dot(m * model.alpha());
}

SensitivityReport sobol_indices(const FittedModel& model, const SobolOptions& options) {
  require_star(model);
  return sobol_indices(model, compute_gammas(model), options);
}

SensitivityReport sobol_indices(const FittedModel& model, const GammaSet& gammas,
                                const SobolOptions& options) {
  require_star(model);
  check_gammas(model, gammas);
  const int d = model.kernel().dimension();

  SensitivityReport report;
  report.total_variance = total_model_variance(model, gammas);
  // Compare against the second moment m0^2 + Var(m).
  const double m0 = model.constant_term();
  const double floor = kDegenerateVariance * (m0 * m0 + report.total_variance);
  if (!(report.total_variance > floor))
    throw NumericalError(fmt::format(
        "model variance {:.3g} is negligible; sensitivity indices are undefined",
        report.total_variance));

  std::vector<Subset> subsets =
      options.all_subsets ? all_nonempty_subsets(d) : subsets_up_to_order(d, options.max_order);
  for (Subset s : options.extra) {
    if (s.empty()) throw std::invalid_argument("requested subset is empty");
    subsets.push_back(s);
  }

  double sum = 0.0;
  for (Subset s : subsets) {
    if (report.indices.contains(s)) continue;
    double value = submodel_variance(model, gammas, s) / report.total_variance;
    if (value < 0.0) {
      if (value < -kClipTolerance)
        throw NumericalError(fmt::format(
            "index of {{{}}} is {:.3g}; Gamma matrices are not positive semi-definite",
            s.label(), value));
      value = 0.0;
      ++report.clipped;
    }
    report.indices.emplace(s, value);
    sum += value;
  }
  report.residual_mass = 1.0 - sum;
  return report;
}

std::string report_json(const SensitivityReport& report) {
  nlohmann::ordered_json j;
  j["total_variance"] = report.total_variance;
  nlohmann::ordered_json idx = nlohmann::ordered_json::object();
  for (const auto& [s, v] : report.indices) idx[s.label()] = v;
  j["indices"] = idx;
  j["residual_mass"] = report.residual_mass;
  j["clipped"] = report.clipped;
  return j.dump(2);
}

std::string report_csv(const SensitivityReport& report) {
  std::string out = "subset,index\n";
  for (const auto& [s, v] : report.indices) out += fmt::format("\"{}\",{:.17g}\n", s.label(), v);
  return out;
}

}  // namespace zanova
