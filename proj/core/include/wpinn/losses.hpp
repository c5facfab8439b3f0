#pragma once

// Discrete training losses for heat/wave control problems.
//
//   total = eq_term + lambda * boundary_term - rho * penalty_term
//
// eq_term is the mean squared pointwise residual over the interior points,
// boundary_term is one sum over lateral, initial and terminal mismatches
// divided by (N1 + 2 N2), and penalty_term sums, per weight network, the mean
// of (phi - 1)^2 over the sample set on which that network is used. In
// standard mode every weight is the constant 1 and penalty_term is 0.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wpinn/field.hpp"
#include "wpinn/geometry.hpp"
#include "wpinn/mlp.hpp"
#include "wpinn/problem.hpp"

namespace wpinn {

enum class Method : std::uint8_t { standard, weighted };
enum class DiffusionWeighting : std::uint8_t { single, per_direction };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

// Role numbering follows the weight indices of the loss: phi_1 .. phi_13.
enum class WeightRole : std::uint8_t {
  time = 1,
  diffusion = 2,
  nonlinearity = 3,
  control = 4,
  lateral = 5,
  initial_state = 6,
  initial_data = 7,
  terminal_state = 8,
  terminal_data = 9,
  initial_velocity = 10,
  initial_velocity_data = 11,
  terminal_velocity = 12,
  terminal_velocity_data = 13,
};

enum class SampleSet : std::uint8_t { interior, boundary, initial, terminal };

SampleSet sample_set(WeightRole role);
std::string to_string(WeightRole role);

struct WeightSlot {
  WeightRole role;
  int direction = -1;  // coordinate index for per-direction diffusion weights

  std::string name() const;  // "phi1", ..., "phibar2", ...
  friend bool operator==(const WeightSlot&, const WeightSlot&) = default;
};

// Slots needed for a problem: heat uses phi_1..phi_9, wave phi_1..phi_13. In
// per-direction mode phi_2 is replaced by one diffusion weight per coordinate.
std::vector<WeightSlot> weight_slots(Equation equation, DiffusionWeighting diffusion, int dim);

struct WeightNet {
  WeightSlot slot;
  MlpParams params;
};

struct WeightNetBundle {
  DiffusionWeighting diffusion = DiffusionWeighting::single;
  std::vector<WeightNet> nets;

  const WeightNet* find(WeightRole role, int direction = -1) const;

  // Throws when the slot set does not match the equation or an input width is not d+1.
  void validate(Equation equation, int dim) const;
};

struct LossBreakdown {
  double eq_term = 0.0;
  double boundary_term = 0.0;
  double penalty_term = 0.0;
  double total = 0.0;
};

struct LossGradients {
  ParamGrad u;
  ParamGrad f;
  std::vector<ParamGrad> weights;  // aligned with WeightNetBundle::nets
};

struct LossEvaluation {
  LossBreakdown loss;
  std::optional<LossGradients> gradients;
};

// `weights == nullptr` selects the standard (unit weight, no penalty) loss.
// Gradients are of `total` with respect to every parameter block.
LossEvaluation evaluate_loss(const ProblemSpec& spec, const TrainBatch& batch, const MlpParams& u,
                             const MlpParams& f, const WeightNetBundle* weights,
                             bool with_gradients);

LossBreakdown loss_heat(const ProblemSpec& spec, const TrainBatch& batch, const MlpParams& u,
                        const MlpParams& f, const WeightNetBundle* weights = nullptr);
LossBreakdown loss_wave(const ProblemSpec& spec, const TrainBatch& batch, const MlpParams& u,
                        const MlpParams& f, const WeightNetBundle* weights = nullptr);

double penalty(const WeightNetBundle& weights, const TrainBatch& batch);

// Pointwise interior residual for any fields; weights == nullptr means unit weights.
//   heat: phi1 dt u - phi2 lap u + phi3 v(u) - phi4 c
//   wave: phi1 dtt u - phi2 lap u + phi3 v(u) - phi4 c
// with c = f 1_omega (internal) or f u (bilinear).
double residual_point(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                      const WeightNetBundle* weights, double t, std::span<const double> x);
double residual_point_heat(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                           const WeightNetBundle* weights, double t, std::span<const double> x);
double residual_point_wave(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                           const WeightNetBundle* weights, double t, std::span<const double> x);

std::string loss_csv_header();
std::string loss_csv_row(long iteration, const LossBreakdown& loss);

}  // namespace wpinn
