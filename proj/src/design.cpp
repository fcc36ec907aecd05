#include "zanova/design.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace zanova {

Design::Design(Eigen::MatrixXd points) : points_(std::move(points)) {
  if (points_.rows() < 1) throw std::invalid_argument("design is empty");
  if (points_.cols() < 1) throw std::invalid_argument("design has no dimensions");
  if (!points_.allFinite()) throw std::invalid_argument("design has non-finite coordinates");
}

bool Design::has_duplicate_rows() const {
  std::vector<Eigen::Index> order(n());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index i = 0; i < d(); ++i) {
      if (points_(a, i) != points_(b, i)) return points_(a, i) < points_(b, i);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  for (std::size_t k = 1; k < order.size(); ++k) {
    if ((points_.row(order[k]) .array() == points_.row(order[k - 1]).array()).all()) return true;
  }
  return false;
}

}  // namespace zanova
