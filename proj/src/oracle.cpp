#include "zanova/oracle.hpp"

#include <fmt/format.h>

#include <cmath>
#include <map>
#include <stdexcept>

namespace zanova::oracle {

namespace {

std::vector<std::size_t> sizes_of(const std::vector<QuadratureRule>& rules) {
  std::vector<std::size_t> s;
  for (const auto& r : rules) s.push_back(r.size());
  return s;
}

std::vector<std::size_t> unflatten(std::size_t flat, const std::vector<std::size_t>& sizes) {
  std::vector<std::size_t> idx(sizes.size());
  for (std::size_t k = sizes.size(); k-- > 0;) {
    idx[k] = flat % sizes[k];
    flat /= sizes[k];
  }
  return idx;
}

std::size_t flatten(const std::vector<std::size_t>& idx, const std::vector<std::size_t>& sizes) {
  std::size_t flat = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) flat = flat * sizes[k] + idx[k];
  return flat;
}

std::vector<QuadratureRule> rules_of(const std::vector<QuadratureRule>& rules, Subset subset) {
  std::vector<QuadratureRule> out;
  for (int i : subset.dims()) out.push_back(rules.at(i));
  return out;
}

void check_subset(const GridFunction& g, Subset subset) {
  if (subset.span_dimension() > g.dimension())
    throw std::invalid_argument(
        fmt::format("subset {{{}}} exceeds grid dimension {}", subset.label(), g.dimension()));
}

// Integrates out every dimension not in `keep`.
GridFunction marginal(const GridFunction& g, Subset keep) {
  GridFunction out{rules_of(g.rules, keep), {}};
  out.values.assign(out.point_count(), 0.0);
  const auto sizes = sizes_of(g.rules);
  const auto out_sizes = sizes_of(out.rules);
  const auto kept = keep.dims();
  std::vector<std::size_t> sub(kept.size());
  for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
    const auto idx = unflatten(flat, sizes);
    double w = 1.0;
    for (int i = 0; i < g.dimension(); ++i)
      if (!keep.contains(i)) w *= g.rules[i].weights()[idx[i]];
    for (std::size_t k = 0; k < kept.size(); ++k) sub[k] = idx[kept[k]];
    out.values[flatten(sub, out_sizes)] += w * g.values[flat];
  }
  return out;
}

// Re-indexes a term on dims `inner` onto the grid of dims `outer` (inner within outer).
std::vector<double> lift(const GridFunction& term, Subset inner, Subset outer,
                         const std::vector<QuadratureRule>& outer_rules) {
  const auto outer_sizes = sizes_of(outer_rules);
  const auto inner_sizes = sizes_of(term.rules);
  const auto outer_dims = outer.dims();
  std::vector<std::size_t> pos;  // position in outer of each inner dim
  for (std::size_t k = 0; k < outer_dims.size(); ++k)
    if (inner.contains(outer_dims[k])) pos.push_back(k);
  std::size_t count = 1;
  for (auto s : outer_sizes) count *= s;
  std::vector<double> out(count);
  std::vector<std::size_t> sub(pos.size());
  for (std::size_t flat = 0; flat < count; ++flat) {
    const auto idx = unflatten(flat, outer_sizes);
    for (std::size_t k = 0; k < pos.size(); ++k) sub[k] = idx[pos[k]];
    out[flat] = term.values[flatten(sub, inner_sizes)];
  }
  return out;
}

GridFunction project_memo(const GridFunction& g, Subset subset,
                          std::map<Subset, GridFunction>& memo) {
  if (auto it = memo.find(subset); it != memo.end()) return it->second;
  GridFunction term = marginal(g, subset);
  // Every strict subset J of `subset`: walk submasks.
  const std::uint32_t full = subset.bits();
  if (full != 0) {
    for (std::uint32_t b = (full - 1) & full;; b = (b - 1) & full) {
      const Subset inner(b);
      const GridFunction lower = project_memo(g, inner, memo);
      const auto lifted = lift(lower, inner, subset, term.rules);
      for (std::size_t k = 0; k < term.values.size(); ++k) term.values[k] -= lifted[k];
      if (b == 0) break;
    }
  }
  memo.emplace(subset, term);
  return term;
}

}  // namespace

std::size_t GridFunction::point_count() const {
  std::size_t count = 1;
  for (const auto& r : rules) count *= r.size();
  return count;
}

double GridFunction::weight(std::size_t flat) const {
  const auto idx = unflatten(flat, sizes_of(rules));
  double w = 1.0;
  for (std::size_t k = 0; k < rules.size(); ++k) w *= rules[k].weights()[idx[k]];
  return w;
}

std::vector<double> GridFunction::point(std::size_t flat) const {
  const auto idx = unflatten(flat, sizes_of(rules));
  std::vector<double> x(rules.size());
  for (std::size_t k = 0; k < rules.size(); ++k) x[k] = rules[k].nodes()[idx[k]];
  return x;
}

GridFunction tabulate(std::vector<QuadratureRule> rules,
                      const std::function<double(const Eigen::VectorXd&)>& f) {
  if (rules.empty() || static_cast<int>(rules.size()) > kMaxGridDimension)
    throw std::invalid_argument(
        fmt::format("tensor grids support 1 to {} dimensions", kMaxGridDimension));
  GridFunction g{std::move(rules), {}};
  const std::size_t count = g.point_count();
  g.values.resize(count);
  const auto sizes = sizes_of(g.rules);
  Eigen::VectorXd x(g.dimension());
  for (std::size_t flat = 0; flat < count; ++flat) {
    const auto idx = unflatten(flat, sizes);
    for (int k = 0; k < g.dimension(); ++k) x[k] = g.rules[k].nodes()[idx[k]];
    g.values[flat] = f(x);
    if (!std::isfinite(g.values[flat]))
      throw std::invalid_argument("tabulated function is not finite on the grid");
  }
  return g;
}

double project_constant(const GridFunction& g) {
  return marginal(g, Subset()).values.at(0);
}

GridFunction project_main_effect(const GridFunction& g, int i) {
  if (i < 0 || i >= g.dimension()) throw std::invalid_argument("main effect index out of range");
  return project(g, Subset::of({i}));
}

GridFunction project_interaction(const GridFunction& g, Subset subset) {
  if (subset.size() < 2 || subset.size() > kMaxGridDimension)
    throw std::invalid_argument("interaction terms need 2 or 3 dimensions");
  return project(g, subset);
}

GridFunction project(const GridFunction& g, Subset subset) {
  check_subset(g, subset);
  std::map<Subset, GridFunction> memo;
  return project_memo(g, subset, memo);
}

double grid_variance(const GridFunction& g) {
  double mean = 0.0;
  for (std::size_t k = 0; k < g.values.size(); ++k) mean += g.weight(k) * g.values[k];
  double var = 0.0;
  for (std::size_t k = 0; k < g.values.size(); ++k) {
    const double dv = g.values[k] - mean;
    var += g.weight(k) * dv * dv;
  }
  return var;
}

double grid_inner(const GridFunction& a, const GridFunction& b) {
  if (a.values.size() != b.values.size()) throw std::invalid_argument("grid size mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.values.size(); ++k) sum += a.weight(k) * a.values[k] * b.values[k];
  return sum;
}

GridFunction expand(const GridFunction& term, Subset subset,
                    const std::vector<QuadratureRule>& full_rules) {
  const Subset full = Subset::full(static_cast<int>(full_rules.size()));
  if (!subset.is_subset_of(full)) throw std::invalid_argument("subset exceeds the full grid");
  return GridFunction{full_rules, lift(term, subset, full, full_rules)};
}

}  // namespace zanova::oracle
