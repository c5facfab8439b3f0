#include "wpinn/field.hpp"

#include <vector>

namespace wpinn {

Eigen::VectorXd SpaceTimeField::values(const Eigen::MatrixXd& points) const {
  Eigen::VectorXd out(points.cols());
  const auto d = static_cast<std::size_t>(points.rows() - 1);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double* col = points.col(j).data();
    out(j) = value(col[0], std::span<const double>(col + 1, d));
  }
  return out;
}

double NetworkField::value(double t, std::span<const double> x) const {
  std::vector<double> z(x.size() + 1);
  z[0] = t;
  std::copy(x.begin(), x.end(), z.begin() + 1);
  return forward(*net_, z);
}

Eigen::VectorXd NetworkField::values(const Eigen::MatrixXd& points) const {
  return forward_batch(*net_, points);
}

}  // namespace wpinn
