#ifndef ZANOVA_DESIGN_HPP
#define ZANOVA_DESIGN_HPP

#include <Eigen/Dense>

namespace zanova {

/// n x d matrix of design points, one point per row. Nonempty and finite.
class Design {
 public:
  explicit Design(Eigen::MatrixXd points);

  Eigen::Index n() const { return points_.rows(); }
  Eigen::Index d() const { return points_.cols(); }
  const Eigen::MatrixXd& points() const { return points_; }
  double operator()(Eigen::Index j, Eigen::Index i) const { return points_(j, i); }
  Eigen::VectorXd row(Eigen::Index j) const { return points_.row(j).transpose(); }

  bool has_duplicate_rows() const;

 private:
  Eigen::MatrixXd points_;
};

}  // namespace zanova

#endif
