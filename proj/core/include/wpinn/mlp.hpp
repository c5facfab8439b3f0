#pragma once

// Dense feedforward networks with exact reverse-mode parameter gradients.
//
// A network maps R^{W_0} -> R. Hidden layers use relu3 (max(0, x^3)) or the
// logistic sigmoid; the scalar output is either passed through unchanged or
// squashed into a closed interval [lo, hi] by lo + (hi - lo) * sigmoid(raw).

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wpinn {

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Activation : std::uint8_t { relu3 = 0, sigmoid = 1 };

struct OutputHead {
  enum class Kind : std::uint8_t { linear = 0, bounded = 1 };
  Kind kind = Kind::linear;
  double lo = 0.0;
  double hi = 0.0;

  static OutputHead linear() { return {}; }
  static OutputHead bounded(double lo, double hi);

  double apply(double raw) const;
  double derivative(double raw) const;

  friend bool operator==(const OutputHead&, const OutputHead&) = default;
};

inline double relu3(double x) { return x > 0.0 ? x * x * x : 0.0; }
inline double relu3_derivative(double x) { return x > 0.0 ? 3.0 * x * x : 0.0; }
inline double relu3_second_derivative(double x) { return x > 0.0 ? 6.0 * x : 0.0; }

double sigmoid(double x);

struct MlpParams {
  std::vector<int> widths;                // W_0 .. W_{L+1}, last entry is 1
  std::vector<Eigen::MatrixXd> weights;   // weights[i] is W_{i+1} x W_i
  std::vector<Eigen::VectorXd> biases;    // biases[i] has length W_{i+1}
  std::vector<Activation> activations;    // one per hidden layer
  OutputHead head;

  int input_dim() const { return widths.empty() ? 0 : widths.front(); }
  int layer_count() const { return static_cast<int>(weights.size()); }
  std::size_t parameter_count() const;

  // Throws ShapeError when the layer shapes do not chain or an entry is non-finite.
  void validate() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

// Same layout as MlpParams::weights / biases; also used for ADAM moments.
struct ParamGrad {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;

  static ParamGrad zeros_like(const MlpParams& params);
  void set_zero();
  bool all_finite() const;
  double squared_norm() const;
  ParamGrad& operator+=(const ParamGrad& other);
  ParamGrad& operator*=(double s);

  friend bool operator==(const ParamGrad&, const ParamGrad&) = default;
};

// Uniform fan-balanced weights on gain * [-sqrt(6/(fan_in+fan_out)), +...], zero biases.
MlpParams init_params(std::vector<int> widths, std::vector<Activation> activations,
                      OutputHead head, std::uint64_t seed, double gain = 1.0);

// Rescales each layer in turn so its pre-activations (and finally the raw
// output) have standard deviation `target_std` over the columns of `inputs`.
// Layers whose pre-activations are constant are left unchanged.
void calibrate_layer_scales(MlpParams& params, const Eigen::MatrixXd& inputs, double target_std = 1.0);

double forward(const MlpParams& params, std::span<const double> x);

// d(upstream * forward(params, x)) / d(params).
ParamGrad backprop(const MlpParams& params, std::span<const double> x, double upstream);

// Activations kept from a batched forward pass; columns are samples.
struct ForwardTape {
  std::vector<Eigen::MatrixXd> pre;   // pre-activation of each hidden layer
  std::vector<Eigen::MatrixXd> post;  // post[0] is the input, post[i+1] = act(pre[i])
  Eigen::RowVectorXd raw;             // final affine output before the head
};

// Evaluates every column of `inputs` (W_0 x n). Fills `tape` when provided.
Eigen::VectorXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs,
                              ForwardTape* tape = nullptr);

// grad += sum_j upstream[j] * d forward(params, column_j) / d params
void accumulate_backprop(const MlpParams& params, const ForwardTape& tape,
                         const Eigen::VectorXd& upstream, ParamGrad& grad);

// Flat views in layer order (weights row-major, then biases) used by
// checkpoints and gradient checks.
std::vector<double> flatten(const MlpParams& params);
std::vector<double> flatten(const ParamGrad& grad);
void unflatten(std::span<const double> values, MlpParams& params);

std::string to_string(Activation a);
Activation activation_from_string(const std::string& name);

}  // namespace wpinn
