#ifndef ZANOVA_ORACLE_HPP
#define ZANOVA_ORACLE_HPP

// Brute-force functional ANOVA on tensor quadrature grids. Used to check
// the closed-form submodels and indices; nothing here depends on them.

#include "zanova/quadrature.hpp"
#include "zanova/subset.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace zanova::oracle {

inline constexpr int kMaxGridDimension = 3;

/// Values of a function on the tensor product of per-dimension rules.
/// Flat index is row-major: the last dimension varies fastest.
struct GridFunction {
  std::vector<QuadratureRule> rules;
  std::vector<double> values;

  int dimension() const { return static_cast<int>(rules.size()); }
  std::size_t point_count() const;
  /// Tensor weight of a flat index.
  double weight(std::size_t flat) const;
  std::vector<double> point(std::size_t flat) const;
};

/// Samples f on the grid. d <= 3.
GridFunction tabulate(std::vector<QuadratureRule> rules,
                      const std::function<double(const Eigen::VectorXd&)>& f);

/// f_0: tensor-weighted mean.
double project_constant(const GridFunction& g);

/// f_i on the nodes of dimension i.
GridFunction project_main_effect(const GridFunction& g, int i);

/// f_I for 2 <= |I| <= 3, obtained by integrating out the other
/// dimensions and subtracting every f_J with J strictly inside I.
GridFunction project_interaction(const GridFunction& g, Subset subset);

/// Any term f_I including I = {} (a zero-dimensional grid).
GridFunction project(const GridFunction& g, Subset subset);

/// Weighted variance sum w (v - mean)^2.
double grid_variance(const GridFunction& g);

/// Weighted inner product of two functions on the same grid.
double grid_inner(const GridFunction& a, const GridFunction& b);

/// Extends a term defined on the dimensions `subset` of the full grid
/// back to the full grid (constant along the other dimensions).
GridFunction expand(const GridFunction& term, Subset subset,
                    const std::vector<QuadratureRule>& full_rules);

}  // namespace zanova::oracle

#endif
