#pragma once

// Scalar fields on space-time. Points are (t, x_1..x_d); batched evaluation
// takes a (d+1) x n matrix whose columns are points.

#include <functional>
#include <span>

#include <Eigen/Dense>

#include "wpinn/mlp.hpp"

namespace wpinn {

class SpaceTimeField {
 public:
  virtual ~SpaceTimeField() = default;

  virtual double value(double t, std::span<const double> x) const = 0;
  virtual Eigen::VectorXd values(const Eigen::MatrixXd& points) const;

  double operator()(double t, std::span<const double> x) const { return value(t, x); }
};

class FunctionField final : public SpaceTimeField {
 public:
  using Fn = std::function<double(double, std::span<const double>)>;
  explicit FunctionField(Fn fn) : fn_(std::move(fn)) {}

  double value(double t, std::span<const double> x) const override { return fn_(t, x); }

 private:
  Fn fn_;
};

// Non-owning view of a network as a field; the network input is (t, x).
class NetworkField final : public SpaceTimeField {
 public:
  explicit NetworkField(const MlpParams& net) : net_(&net) {}

  double value(double t, std::span<const double> x) const override;
  Eigen::VectorXd values(const Eigen::MatrixXd& points) const override;

 private:
  const MlpParams* net_;
};

}  // namespace wpinn
