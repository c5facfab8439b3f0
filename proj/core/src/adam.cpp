#include "wpinn/adam.hpp"

#include <cmath>

namespace wpinn {

AdamState AdamState::for_params(const MlpParams& params, AdamConfig config) {
  AdamState s;
  s.config = config;
  s.m = ParamGrad::zeros_like(params);
  s.v = ParamGrad::zeros_like(params);
  return s;
}

namespace {

template <class Param, class Moment>
void update_block(Param& p, Moment& m, Moment& v, const Moment& g, double lr, double b1, double b2,
                  double eps, double bias1, double bias2, double sign) {
  m = b1 * m + (1.0 - b1) * g;
  v = b2 * v + (1.0 - b2) * g.cwiseAbs2();
  p.array() += sign * lr * (m.array() / bias1) / ((v.array() / bias2).sqrt() + eps);
}

}  // namespace

void adam_step(AdamState& state, MlpParams& params, const ParamGrad& grad, Direction direction,
               std::string_view block) {
  if (grad.weights.size() != params.weights.size() || state.m.weights.size() != params.weights.size()) {
    throw ShapeError("ADAM state/gradient does not match parameters of " + std::string(block));
  }
  for (std::size_t i = 0; i < grad.weights.size(); ++i) {
    if (!grad.weights[i].allFinite()) {
      throw NonFiniteGradient("non-finite gradient in " + std::string(block) + " layer " + std::to_string(i) +
                              " weights");
    }
    if (!grad.biases[i].allFinite()) {
      throw NonFiniteGradient("non-finite gradient in " + std::string(block) + " layer " + std::to_string(i) +
                              " biases");
    }
  }

  const auto& c = state.config;
  state.step += 1;
  const double bias1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  const double sign = direction == Direction::descend ? -1.0 : 1.0;
  for (std::size_t i = 0; i < params.weights.size(); ++i) {
    update_block(params.weights[i], state.m.weights[i], state.v.weights[i], grad.weights[i], c.lr, c.beta1,
                 c.beta2, c.eps, bias1, bias2, sign);
    update_block(params.biases[i], state.m.biases[i], state.v.biases[i], grad.biases[i], c.lr, c.beta1,
                 c.beta2, c.eps, bias1, bias2, sign);
  }
}

}  // namespace wpinn
