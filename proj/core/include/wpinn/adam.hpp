#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "wpinn/mlp.hpp"

namespace wpinn {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

enum class Direction { descend, ascend };

class NonFiniteGradient : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Moments are shaped like the parameters they update.
struct AdamState {
  AdamConfig config;
  ParamGrad m;
  ParamGrad v;
  long step = 0;

  static AdamState for_params(const MlpParams& params, AdamConfig config = {});
};

// Bias-corrected ADAM. Descend moves against the gradient, ascend along it.
// Throws NonFiniteGradient naming `block` if any gradient entry is not finite;
// neither params nor state are modified in that case.
void adam_step(AdamState& state, MlpParams& params, const ParamGrad& grad, Direction direction,
               std::string_view block = "params");

}  // namespace wpinn
