#pragma once

// Gradient-descent-ascent training: ADAM descends on the solution and control
// networks and ascends on the weight networks, with a fresh batch per
// iteration.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wpinn/adam.hpp"
#include "wpinn/geometry.hpp"
#include "wpinn/losses.hpp"
#include "wpinn/mlp.hpp"
#include "wpinn/problem.hpp"

namespace wpinn {

enum class UpdateSchedule : std::uint8_t {
  simultaneous,  // one gradient evaluation, every player steps once
  alternating,   // descend first, then `ascent_steps` ascents on the same batch
};

struct TrainConfig {
  ProblemSpec spec;
  Method method = Method::weighted;
  DiffusionWeighting diffusion = DiffusionWeighting::single;
  int iterations = 10000;
  int n1 = 1000;
  std::uint64_t seed = 0;

  std::vector<int> solution_hidden = {100, 100, 100};
  double solution_init_gain = 1.0;
  // Rescale the solution and control networks layer by layer on an interior
  // sample so pre-activations start with unit spread.
  bool calibrate_solution_init = true;
  int calibration_points = 512;
  Activation solution_activation = Activation::relu3;
  std::vector<int> weight_hidden = {40, 40, 40};
  std::vector<Activation> weight_activations = {Activation::relu3, Activation::relu3, Activation::sigmoid};
  double weight_lo = 0.2;
  double weight_hi = 5.0;
  // Start every weight network at the neutral output 1 by shifting its output bias.
  bool neutral_weight_init = true;

  double lr_min = 1e-3;  // solution and control networks
  double lr_max = 1e-3;  // weight networks
  int log_every = 10;
  UpdateSchedule schedule = UpdateSchedule::simultaneous;
  int ascent_steps = 1;

  void validate() const;
};

struct Networks {
  MlpParams u;
  MlpParams f;
  std::optional<WeightNetBundle> weights;  // present for the weighted method
};

struct OptimizerStates {
  AdamState u;
  AdamState f;
  std::vector<AdamState> weights;
};

Networks init_networks(const TrainConfig& config);
OptimizerStates init_optimizers(const TrainConfig& config, const Networks& nets);

// Draws a fresh batch, evaluates loss and gradients, applies one GDA update and
// returns the loss measured before the update. With a frozen batch supplied the
// sampler is not touched.
LossBreakdown minmax_iteration(const TrainConfig& config, Networks& nets, OptimizerStates& states,
                               Sampler& sampler);
LossBreakdown minmax_iteration_on(const TrainConfig& config, Networks& nets, OptimizerStates& states,
                                  const TrainBatch& batch);

struct LossRow {
  long iteration = 0;
  LossBreakdown loss;
};

struct TrainingReport {
  std::vector<LossRow> rows;
  Networks nets;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  long iterations_completed = 0;
  std::optional<std::string> failure;  // set when training aborted; rows hold the partial curve
};

// Iteration k (1-based) is logged when k % log_every == 0 or k is the last one.
bool should_log(long iteration, int iterations, int log_every);

TrainingReport train(const TrainConfig& config);

// Independent generator streams derived from the run seed.
inline constexpr std::uint64_t kInitStream = 1;
inline constexpr std::uint64_t kTrainSampleStream = 2;
inline constexpr std::uint64_t kTestSampleStream = 3;
inline constexpr std::uint64_t kCalibrationStream = 4;

}  // namespace wpinn
