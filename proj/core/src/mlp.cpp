#include "wpinn/mlp.hpp"

#include <cmath>
#include <random>

namespace wpinn {

OutputHead OutputHead::bounded(double lo, double hi) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("bounded output head requires finite lo < hi");
  }
  return {Kind::bounded, lo, hi};
}

double OutputHead::apply(double raw) const {
  if (kind == Kind::linear) return raw;
  return lo + (hi - lo) * sigmoid(raw);
}

double OutputHead::derivative(double raw) const {
  if (kind == Kind::linear) return 1.0;
  const double s = sigmoid(raw);
  return (hi - lo) * s * (1.0 - s);
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

namespace {

void apply_activation(Activation a, const Eigen::MatrixXd& pre, Eigen::MatrixXd& post) {
  post.resize(pre.rows(), pre.cols());
  const auto n = pre.size();
  const double* in = pre.data();
  double* out = post.data();
  switch (a) {
    case Activation::relu3:
      for (Eigen::Index k = 0; k < n; ++k) out[k] = relu3(in[k]);
      break;
    case Activation::sigmoid:
      for (Eigen::Index k = 0; k < n; ++k) out[k] = sigmoid(in[k]);
      break;
  }
}

// delta *= act'(pre), using post = act(pre) where that is cheaper.
void scale_by_derivative(Activation a, const Eigen::MatrixXd& pre, const Eigen::MatrixXd& post,
                         Eigen::MatrixXd& delta) {
  const auto n = delta.size();
  double* g = delta.data();
  switch (a) {
    case Activation::relu3: {
      const double* z = pre.data();
      for (Eigen::Index k = 0; k < n; ++k) g[k] *= relu3_derivative(z[k]);
      break;
    }
    case Activation::sigmoid: {
      const double* s = post.data();
      for (Eigen::Index k = 0; k < n; ++k) g[k] *= s[k] * (1.0 - s[k]);
      break;
    }
  }
}

void check_input_rows(const MlpParams& params, Eigen::Index rows) {
  if (params.weights.empty()) throw ShapeError("network has no layers");
  if (rows != params.input_dim()) {
    throw ShapeError("input has " + std::to_string(rows) + " entries, network expects " +
                     std::to_string(params.input_dim()));
  }
}

}  // namespace

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    n += static_cast<std::size_t>(weights[i].size() + biases[i].size());
  }
  return n;
}

void MlpParams::validate() const {
  if (widths.size() < 2) throw ShapeError("a network needs at least input and output widths");
  if (widths.back() != 1) throw ShapeError("network output width must be 1");
  for (int w : widths) {
    if (w < 1) throw ShapeError("layer widths must be positive");
  }
  const std::size_t layers = widths.size() - 1;
  if (weights.size() != layers || biases.size() != layers) {
    throw ShapeError("weight/bias count does not match widths");
  }
  if (activations.size() != layers - 1) {
    throw ShapeError("need one activation per hidden layer");
  }
  for (std::size_t i = 0; i < layers; ++i) {
    if (weights[i].rows() != widths[i + 1] || weights[i].cols() != widths[i]) {
      throw ShapeError("weight matrix " + std::to_string(i) + " has wrong shape");
    }
    if (biases[i].size() != widths[i + 1]) {
      throw ShapeError("bias vector " + std::to_string(i) + " has wrong length");
    }
    if (!weights[i].allFinite() || !biases[i].allFinite()) {
      throw ShapeError("non-finite parameter in layer " + std::to_string(i));
    }
  }
  if (head.kind == OutputHead::Kind::bounded && !(head.lo < head.hi)) {
    throw ShapeError("bounded head requires lo < hi");
  }
}

ParamGrad ParamGrad::zeros_like(const MlpParams& params) {
  ParamGrad g;
  g.weights.reserve(params.weights.size());
  g.biases.reserve(params.biases.size());
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    g.weights.push_back(Eigen::MatrixXd::Zero(params.weights[i].rows(), params.weights[i].cols()));
    g.biases.push_back(Eigen::VectorXd::Zero(params.biases[i].size()));
  }
  return g;
}

void ParamGrad::set_zero() {
  for (auto& w : weights) w.setZero();
  for (auto& b : biases) b.setZero();
}

bool ParamGrad::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  for (const auto& b : biases) {
    if (!b.allFinite()) return false;
  }
  return true;
}

double ParamGrad::squared_norm() const {
  double s = 0.0;
  for (const auto& w : weights) s += w.squaredNorm();
  for (const auto& b : biases) s += b.squaredNorm();
  return s;
}

ParamGrad& ParamGrad::operator+=(const ParamGrad& other) {
  if (other.weights.size() != weights.size()) throw ShapeError("gradient layer count mismatch");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] += other.weights[i];
    biases[i] += other.biases[i];
  }
  return *this;
}

ParamGrad& ParamGrad::operator*=(double s) {
  for (auto& w : weights) w *= s;
  for (auto& b : biases) b *= s;
  return *this;
}

MlpParams init_params(std::vector<int> widths, std::vector<Activation> activations,
                      OutputHead head, std::uint64_t seed, double gain) {
  if (!(gain > 0.0)) throw std::invalid_argument("init gain must be positive");
  if (widths.empty()) throw ShapeError("empty widths list");
  if (widths.size() < 2) throw ShapeError("widths must list input and output sizes");
  MlpParams p;
  p.widths = std::move(widths);
  p.activations = std::move(activations);
  p.head = head;

  std::mt19937_64 gen(seed);
  for (std::size_t i = 0; i + 1 < p.widths.size(); ++i) {
    const int fan_in = p.widths[i];
    const int fan_out = p.widths[i + 1];
    if (fan_in < 1 || fan_out < 1) throw ShapeError("layer widths must be positive");
    const double bound = gain * std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-bound, bound);
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r) {
      for (int c = 0; c < fan_in; ++c) w(r, c) = dist(gen);
    }
    p.weights.push_back(std::move(w));
    p.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  p.validate();
  return p;
}

Eigen::VectorXd forward_batch(const MlpParams& params, const Eigen::MatrixXd& inputs,
                              ForwardTape* tape) {
  check_input_rows(params, inputs.rows());
  const std::size_t hidden = params.activations.size();

  ForwardTape local;
  ForwardTape& t = tape ? *tape : local;
  t.pre.resize(hidden);
  t.post.resize(hidden + 1);
  t.post[0] = inputs;

  for (std::size_t i = 0; i < hidden; ++i) {
    t.pre[i].noalias() = params.weights[i] * t.post[i];
    t.pre[i].colwise() += params.biases[i];
    apply_activation(params.activations[i], t.pre[i], t.post[i + 1]);
  }
  t.raw.noalias() = params.weights[hidden] * t.post[hidden];
  t.raw.array() += params.biases[hidden](0);

  Eigen::VectorXd out(inputs.cols());
  for (Eigen::Index j = 0; j < inputs.cols(); ++j) out(j) = params.head.apply(t.raw(j));
  return out;
}

void accumulate_backprop(const MlpParams& params, const ForwardTape& tape,
                         const Eigen::VectorXd& upstream, ParamGrad& grad) {
  const Eigen::Index n = tape.raw.size();
  if (upstream.size() != n) throw ShapeError("upstream length does not match batch size");
  if (grad.weights.size() != params.weights.size()) throw ShapeError("gradient shape mismatch");
  const std::size_t hidden = params.activations.size();

  Eigen::RowVectorXd d_raw(n);
  for (Eigen::Index j = 0; j < n; ++j) d_raw(j) = upstream(j) * params.head.derivative(tape.raw(j));

  grad.weights[hidden].noalias() += d_raw * tape.post[hidden].transpose();
  grad.biases[hidden](0) += d_raw.sum();
  if (hidden == 0) return;

  Eigen::MatrixXd delta = params.weights[hidden].transpose() * d_raw;
  for (std::size_t k = hidden; k-- > 0;) {
    scale_by_derivative(params.activations[k], tape.pre[k], tape.post[k + 1], delta);
    grad.weights[k].noalias() += delta * tape.post[k].transpose();
    grad.biases[k] += delta.rowwise().sum();
    if (k > 0) {
      Eigen::MatrixXd next = params.weights[k].transpose() * delta;
      delta.swap(next);
    }
  }
}

void calibrate_layer_scales(MlpParams& params, const Eigen::MatrixXd& inputs, double target_std) {
  check_input_rows(params, inputs.rows());
  if (!(target_std > 0.0)) throw std::invalid_argument("target std must be positive");
  if (inputs.cols() < 2) throw std::invalid_argument("calibration needs at least two samples");
  auto std_of = [](const Eigen::MatrixXd& m) {
    const double mean = m.mean();
    return std::sqrt((m.array() - mean).square().mean());
  };
  Eigen::MatrixXd act = inputs;
  const std::size_t hidden = params.activations.size();
  for (std::size_t i = 0; i <= hidden; ++i) {
    Eigen::MatrixXd pre = params.weights[i] * act;
    pre.colwise() += params.biases[i];
    const double s = std_of(pre);
    if (s > 0.0 && std::isfinite(s)) {
      const double k = target_std / s;
      params.weights[i] *= k;
      params.biases[i] *= k;
      pre *= k;
    }
    if (i < hidden) {
      Eigen::MatrixXd post;
      apply_activation(params.activations[i], pre, post);
      act.swap(post);
    }
  }
  params.validate();
}

double forward(const MlpParams& params, std::span<const double> x) {
  const Eigen::Map<const Eigen::MatrixXd> col(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  return forward_batch(params, col)(0);
}

ParamGrad backprop(const MlpParams& params, std::span<const double> x, double upstream) {
  const Eigen::Map<const Eigen::MatrixXd> col(x.data(), static_cast<Eigen::Index>(x.size()), 1);
  ForwardTape tape;
  forward_batch(params, col, &tape);
  ParamGrad g = ParamGrad::zeros_like(params);
  accumulate_backprop(params, tape, Eigen::VectorXd::Constant(1, upstream), g);
  return g;
}

namespace {

template <class Matrices, class Vectors>
std::vector<double> flatten_blocks(const Matrices& ws, const Vectors& bs) {
  std::vector<double> out;
  for (std::size_t i = 0; i < ws.size(); ++i) {
    for (Eigen::Index r = 0; r < ws[i].rows(); ++r) {
      for (Eigen::Index c = 0; c < ws[i].cols(); ++c) out.push_back(ws[i](r, c));
    }
    for (Eigen::Index r = 0; r < bs[i].size(); ++r) out.push_back(bs[i](r));
  }
  return out;
}

}  // namespace

std::vector<double> flatten(const MlpParams& params) {
  return flatten_blocks(params.weights, params.biases);
}

std::vector<double> flatten(const ParamGrad& grad) { return flatten_blocks(grad.weights, grad.biases); }

void unflatten(std::span<const double> values, MlpParams& params) {
  if (values.size() != params.parameter_count()) throw ShapeError("flat parameter length mismatch");
  std::size_t k = 0;
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    auto& w = params.weights[i];
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = values[k++];
    }
    for (Eigen::Index r = 0; r < params.biases[i].size(); ++r) params.biases[i](r) = values[k++];
  }
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu3: return "relu3";
    case Activation::sigmoid: return "sigmoid";
  }
  return "unknown";
}

Activation activation_from_string(const std::string& name) {
  if (name == "relu3") return Activation::relu3;
  if (name == "sigmoid") return Activation::sigmoid;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

}  // namespace wpinn
