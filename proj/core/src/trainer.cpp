#include "wpinn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <stdexcept>

namespace wpinn {

void TrainConfig::validate() const {
  spec.validate();
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (n1 < spec.dim) throw std::invalid_argument("N1 must be >= d so that N2 >= 1");
  if (log_every < 1) throw std::invalid_argument("log_every must be >= 1");
  if (ascent_steps < 1) throw std::invalid_argument("ascent_steps must be >= 1");
  if (solution_hidden.empty() || weight_hidden.empty()) throw std::invalid_argument("networks need hidden layers");
  if (weight_activations.size() != weight_hidden.size()) {
    throw std::invalid_argument("need one weight-network activation per hidden layer");
  }
  if (!(weight_lo < 1.0 && 1.0 < weight_hi)) {
    throw std::invalid_argument("weight output range must contain 1");
  }
  if (!(lr_min >= 0.0) || !(lr_max >= 0.0)) throw std::invalid_argument("learning rates must be >= 0");
}

Networks init_networks(const TrainConfig& config) {
  config.validate();
  const int in = config.spec.dim + 1;
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    static_cast<std::uint32_t>(kInitStream), 0u};
  std::mt19937_64 seeds(seq);

  std::vector<int> sol_widths{in};
  sol_widths.insert(sol_widths.end(), config.solution_hidden.begin(), config.solution_hidden.end());
  sol_widths.push_back(1);
  const std::vector<Activation> sol_acts(config.solution_hidden.size(), config.solution_activation);

  Networks nets;
  nets.u = init_params(sol_widths, sol_acts, OutputHead::linear(), seeds(), config.solution_init_gain);
  nets.f = init_params(sol_widths, sol_acts, OutputHead::linear(), seeds(), config.solution_init_gain);
  if (config.calibrate_solution_init) {
    Sampler calib(config.seed, kCalibrationStream);
    const Eigen::MatrixXd pts = calib.interior(config.spec.domain, config.spec.horizon, config.calibration_points);
    calibrate_layer_scales(nets.u, pts);
    calibrate_layer_scales(nets.f, pts);
  }

  if (config.method == Method::weighted) {
    std::vector<int> w_widths{in};
    w_widths.insert(w_widths.end(), config.weight_hidden.begin(), config.weight_hidden.end());
    w_widths.push_back(1);
    const auto head = OutputHead::bounded(config.weight_lo, config.weight_hi);
    WeightNetBundle bundle;
    bundle.diffusion = config.diffusion;
    for (const auto& slot : weight_slots(config.spec.equation, config.diffusion, config.spec.dim)) {
      MlpParams p = init_params(w_widths, config.weight_activations, head, seeds());
      if (config.neutral_weight_init) {
        // Output layer reads 0 + b with lo + (hi - lo) sigmoid(b) = 1. The last
        // hidden layer is a sigmoid, so its weights must go too, not just the bias.
        p.weights.back().setZero();
        const double s = (1.0 - head.lo) / (head.hi - head.lo);
        p.biases.back()(0) = std::log(s / (1.0 - s));
      }
      bundle.nets.push_back({slot, std::move(p)});
    }
    nets.weights = std::move(bundle);
  }
  return nets;
}

OptimizerStates init_optimizers(const TrainConfig& config, const Networks& nets) {
  AdamConfig descend;
  descend.lr = config.lr_min;
  AdamConfig ascend;
  ascend.lr = config.lr_max;
  OptimizerStates s;
  s.u = AdamState::for_params(nets.u, descend);
  s.f = AdamState::for_params(nets.f, descend);
  if (nets.weights) {
    for (const auto& n : nets.weights->nets) s.weights.push_back(AdamState::for_params(n.params, ascend));
  }
  return s;
}

namespace {

void ascend_weights(Networks& nets, OptimizerStates& states, const LossGradients& grads) {
  if (!nets.weights) return;
  auto& bundle = *nets.weights;
  for (std::size_t k = 0; k < bundle.nets.size(); ++k) {
    adam_step(states.weights[k], bundle.nets[k].params, grads.weights[k], Direction::ascend,
              bundle.nets[k].slot.name());
  }
}

}  // namespace

LossBreakdown minmax_iteration_on(const TrainConfig& config, Networks& nets, OptimizerStates& states,
                                  const TrainBatch& batch) {
  const WeightNetBundle* weights =
      (config.method == Method::weighted && nets.weights) ? &*nets.weights : nullptr;
  LossEvaluation eval = evaluate_loss(config.spec, batch, nets.u, nets.f, weights, true);
  const LossGradients& g = *eval.gradients;

  // Check every block before touching any parameters.
  if (!g.u.all_finite()) throw NonFiniteGradient("non-finite gradient in u");
  if (!g.f.all_finite()) throw NonFiniteGradient("non-finite gradient in f");
  for (std::size_t k = 0; k < g.weights.size(); ++k) {
    if (!g.weights[k].all_finite()) {
      throw NonFiniteGradient("non-finite gradient in weight net " + weights->nets[k].slot.name());
    }
  }

  adam_step(states.u, nets.u, g.u, Direction::descend, "u");
  adam_step(states.f, nets.f, g.f, Direction::descend, "f");
  if (!weights) return eval.loss;

  if (config.schedule == UpdateSchedule::simultaneous) {
    ascend_weights(nets, states, g);
    for (int k = 1; k < config.ascent_steps; ++k) {
      LossEvaluation again = evaluate_loss(config.spec, batch, nets.u, nets.f, &*nets.weights, true);
      ascend_weights(nets, states, *again.gradients);
    }
  } else {
    for (int k = 0; k < config.ascent_steps; ++k) {
      LossEvaluation again = evaluate_loss(config.spec, batch, nets.u, nets.f, &*nets.weights, true);
      ascend_weights(nets, states, *again.gradients);
    }
  }
  return eval.loss;
}

LossBreakdown minmax_iteration(const TrainConfig& config, Networks& nets, OptimizerStates& states,
                               Sampler& sampler) {
  const TrainBatch batch = sampler.batch(config.spec.domain, config.spec.horizon, config.n1);
  return minmax_iteration_on(config, nets, states, batch);
}

bool should_log(long iteration, int iterations, int log_every) {
  return iteration % log_every == 0 || iteration == iterations;
}

TrainingReport train(const TrainConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  TrainingReport report;
  report.seed = config.seed;
  report.nets = init_networks(config);
  OptimizerStates states = init_optimizers(config, report.nets);
  Sampler sampler(config.seed, kTrainSampleStream);

  try {
    for (long k = 1; k <= config.iterations; ++k) {
      const LossBreakdown loss = minmax_iteration(config, report.nets, states, sampler);
      if (should_log(k, config.iterations, config.log_every)) report.rows.push_back({k, loss});
      report.iterations_completed = k;
    }
  } catch (const NonFiniteGradient& e) {
    report.failure = "iteration " + std::to_string(report.iterations_completed + 1) + ": " + e.what();
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace wpinn
