#include "wpinn/losses.hpp"

#include <cstdio>
#include <stdexcept>

#include "wpinn/fd.hpp"

namespace wpinn {

std::string to_string(Method m) { return m == Method::standard ? "standard" : "weighted"; }

Method method_from_string(const std::string& name) {
  if (name == "standard") return Method::standard;
  if (name == "weighted") return Method::weighted;
  throw std::invalid_argument("unknown method '" + name + "' (expected standard or weighted)");
}

SampleSet sample_set(WeightRole role) {
  switch (role) {
    case WeightRole::time:
    case WeightRole::diffusion:
    case WeightRole::nonlinearity:
    case WeightRole::control: return SampleSet::interior;
    case WeightRole::lateral: return SampleSet::boundary;
    case WeightRole::initial_state:
    case WeightRole::initial_data:
    case WeightRole::initial_velocity:
    case WeightRole::initial_velocity_data: return SampleSet::initial;
    case WeightRole::terminal_state:
    case WeightRole::terminal_data:
    case WeightRole::terminal_velocity:
    case WeightRole::terminal_velocity_data: return SampleSet::terminal;
  }
  throw std::logic_error("unhandled weight role");
}

std::string to_string(WeightRole role) { return "phi" + std::to_string(static_cast<int>(role)); }

std::string WeightSlot::name() const {
  if (direction >= 0) return "phibar" + std::to_string(direction + 1);
  return to_string(role);
}

std::vector<WeightSlot> weight_slots(Equation equation, DiffusionWeighting diffusion, int dim) {
  const int last = equation == Equation::heat ? 9 : 13;
  std::vector<WeightSlot> slots;
  for (int k = 1; k <= last; ++k) {
    const auto role = static_cast<WeightRole>(k);
    if (role == WeightRole::diffusion && diffusion == DiffusionWeighting::per_direction) {
      for (int i = 0; i < dim; ++i) slots.push_back({WeightRole::diffusion, i});
    } else {
      slots.push_back({role, -1});
    }
  }
  return slots;
}

const WeightNet* WeightNetBundle::find(WeightRole role, int direction) const {
  for (const auto& n : nets) {
    if (n.slot.role == role && n.slot.direction == direction) return &n;
  }
  return nullptr;
}

void WeightNetBundle::validate(Equation equation, int dim) const {
  const auto expected = weight_slots(equation, diffusion, dim);
  if (expected.size() != nets.size()) {
    throw std::invalid_argument("weight bundle has " + std::to_string(nets.size()) + " nets, expected " +
                                std::to_string(expected.size()));
  }
  for (std::size_t k = 0; k < nets.size(); ++k) {
    if (!(nets[k].slot == expected[k])) {
      throw std::invalid_argument("weight bundle slot " + std::to_string(k) + " is " + nets[k].slot.name() +
                                  ", expected " + expected[k].name());
    }
    if (nets[k].params.input_dim() != dim + 1) {
      throw std::invalid_argument("weight net " + nets[k].slot.name() + " must take d+1 inputs");
    }
  }
}

namespace {

const Eigen::MatrixXd& points_for(SampleSet set, const TrainBatch& batch) {
  switch (set) {
    case SampleSet::interior: return batch.interior;
    case SampleSet::boundary: return batch.boundary;
    case SampleSet::initial: return batch.initial;
    case SampleSet::terminal: return batch.terminal;
  }
  throw std::logic_error("unhandled sample set");
}

void check_batch(const ProblemSpec& spec, const TrainBatch& batch) {
  const auto rows = static_cast<Eigen::Index>(spec.dim + 1);
  if (batch.interior.rows() != rows || batch.boundary.rows() != rows || batch.initial.rows() != rows ||
      batch.terminal.rows() != rows) {
    throw std::invalid_argument("batch dimension does not match problem dimension");
  }
  if (batch.interior.cols() < 1 || batch.boundary.cols() < 1 || batch.initial.cols() < 1 ||
      batch.terminal.cols() < 1) {
    throw std::invalid_argument("batch has an empty sample set");
  }
  for (Eigen::Index j = 0; j < batch.initial.cols(); ++j) {
    if (batch.initial(0, j) != 0.0) throw std::invalid_argument("initial slice points must have t = 0");
  }
  for (Eigen::Index j = 0; j < batch.terminal.cols(); ++j) {
    if (batch.terminal(0, j) != spec.horizon) {
      throw std::invalid_argument("terminal slice points must have t = T");
    }
  }
}

std::span<const double> spatial(const Eigen::MatrixXd& pts, Eigen::Index j) {
  return {pts.col(j).data() + 1, static_cast<std::size_t>(pts.rows() - 1)};
}

// Values of each weight slot on its own sample set; empty in standard mode.
struct WeightEvaluation {
  std::vector<Eigen::VectorXd> values;
  std::vector<ForwardTape> tapes;
  std::vector<int> by_role = std::vector<int>(14, -1);
  std::vector<int> by_direction;

  const double* data(WeightRole role) const {
    const int k = by_role[static_cast<int>(role)];
    return k < 0 ? nullptr : values[static_cast<std::size_t>(k)].data();
  }
  const double* direction_data(int i) const {
    if (by_direction.empty()) return nullptr;
    return values[static_cast<std::size_t>(by_direction[static_cast<std::size_t>(i)])].data();
  }
};

inline double at(const double* w, Eigen::Index j) { return w ? w[j] : 1.0; }

}  // namespace

LossEvaluation evaluate_loss(const ProblemSpec& spec, const TrainBatch& batch, const MlpParams& u,
                             const MlpParams& f, const WeightNetBundle* weights, bool with_gradients) {
  spec.validate();
  check_batch(spec, batch);
  if (weights) weights->validate(spec.equation, spec.dim);

  const int d = spec.dim;
  const double h = spec.fd.h;
  const bool wave = spec.equation == Equation::wave;
  const bool bilinear = spec.control == ControlKind::bilinear;
  const Eigen::Index n1 = batch.interior.cols();
  const Eigen::Index nb = batch.boundary.cols();
  const Eigen::Index n0 = batch.initial.cols();
  const Eigen::Index nt = batch.terminal.cols();

  // u probe layout: interior [base, t+h, t+2h | t-h, (x+h e_i, x-h e_i)_i],
  // then boundary, then the initial and terminal slices (wave adds t+h, t+2h).
  const Eigen::Index interior_blocks = 3 + 2 * d;
  const Eigen::Index slice_blocks = wave ? 3 : 1;
  Eigen::MatrixXd probes(d + 1, interior_blocks * n1 + nb + slice_blocks * (n0 + nt));
  Eigen::Index off = 0;
  const auto put = [&](const Eigen::MatrixXd& pts, Eigen::Index row, double shift) {
    probes.middleCols(off, pts.cols()) = pts;
    if (shift != 0.0) probes.block(row, off, 1, pts.cols()).array() += shift;
    off += pts.cols();
  };
  put(batch.interior, 0, 0.0);
  put(batch.interior, 0, h);
  put(batch.interior, 0, wave ? -h : 2.0 * h);
  for (int i = 0; i < d; ++i) {
    put(batch.interior, i + 1, h);
    put(batch.interior, i + 1, -h);
  }
  const Eigen::Index boundary_off = off;
  put(batch.boundary, 0, 0.0);
  const Eigen::Index initial_off = off;
  put(batch.initial, 0, 0.0);
  if (wave) {
    put(batch.initial, 0, h);
    put(batch.initial, 0, 2.0 * h);
  }
  const Eigen::Index terminal_off = off;
  put(batch.terminal, 0, 0.0);
  if (wave) {
    put(batch.terminal, 0, h);
    put(batch.terminal, 0, 2.0 * h);
  }

  ForwardTape u_tape, f_tape;
  const Eigen::VectorXd U = forward_batch(u, probes, with_gradients ? &u_tape : nullptr);
  const Eigen::VectorXd F = forward_batch(f, batch.interior, with_gradients ? &f_tape : nullptr);

  WeightEvaluation w;
  if (weights) {
    w.values.resize(weights->nets.size());
    w.tapes.resize(weights->nets.size());
    for (std::size_t k = 0; k < weights->nets.size(); ++k) {
      const auto& net = weights->nets[k];
      const auto& pts = points_for(sample_set(net.slot.role), batch);
      w.values[k] = forward_batch(net.params, pts, with_gradients ? &w.tapes[k] : nullptr);
      if (net.slot.direction >= 0) {
        w.by_direction.push_back(static_cast<int>(k));
      } else {
        w.by_role[static_cast<int>(net.slot.role)] = static_cast<int>(k);
      }
    }
  }
  const bool per_direction = !w.by_direction.empty();

  Eigen::VectorXd dU, dF;
  std::vector<Eigen::VectorXd> dW;
  if (with_gradients) {
    dU = Eigen::VectorXd::Zero(U.size());
    dF = Eigen::VectorXd::Zero(F.size());
    for (const auto& v : w.values) dW.push_back(Eigen::VectorXd::Zero(v.size()));
  }
  const auto grad_of = [&](WeightRole role) -> double* {
    const int k = w.by_role[static_cast<int>(role)];
    return (with_gradients && k >= 0) ? dW[static_cast<std::size_t>(k)].data() : nullptr;
  };

  // Interior residual.
  const double* w1 = w.data(WeightRole::time);
  const double* w2 = w.data(WeightRole::diffusion);
  const double* w3 = w.data(WeightRole::nonlinearity);
  const double* w4 = w.data(WeightRole::control);
  double* g1 = grad_of(WeightRole::time);
  double* g2 = grad_of(WeightRole::diffusion);
  double* g3 = grad_of(WeightRole::nonlinearity);
  double* g4 = grad_of(WeightRole::control);
  const auto dt_coef = forward_dt_coefficients(h);
  const auto dd_coef = second_difference_coefficients(h);
  std::vector<double> lap_i(static_cast<std::size_t>(d));
  std::vector<double> diff_w(static_cast<std::size_t>(d));

  double eq_sum = 0.0;
  for (Eigen::Index j = 0; j < n1; ++j) {
    const double u0 = U(j);
    const double ua = U(n1 + j);
    const double ub = U(2 * n1 + j);
    const double time_term =
        wave ? second_difference_quotient(ub, u0, ua, h) : forward_dt_quotient(u0, ua, ub, h);
    double lap = 0.0;
    double diffusion = 0.0;
    for (int i = 0; i < d; ++i) {
      const double plus = U((3 + 2 * i) * n1 + j);
      const double minus = U((4 + 2 * i) * n1 + j);
      lap_i[static_cast<std::size_t>(i)] = second_difference_quotient(minus, u0, plus, h);
      lap += lap_i[static_cast<std::size_t>(i)];
    }
    if (per_direction) {
      for (int i = 0; i < d; ++i) {
        diff_w[static_cast<std::size_t>(i)] = w.direction_data(i)[j];
        diffusion += diff_w[static_cast<std::size_t>(i)] * lap_i[static_cast<std::size_t>(i)];
      }
    } else {
      const double wd = at(w2, j);
      for (int i = 0; i < d; ++i) diff_w[static_cast<std::size_t>(i)] = wd;
      diffusion = wd * lap;
    }
    const double chi = bilinear ? 0.0 : static_cast<double>(indicator(spec.region, spatial(batch.interior, j)));
    const double control = bilinear ? F(j) * u0 : F(j) * chi;
    const double nonlinear = spec.nonlinearity.value(u0);
    const double r = at(w1, j) * time_term - diffusion + at(w3, j) * nonlinear - at(w4, j) * control;
    eq_sum += r * r;

    if (!with_gradients) continue;
    const double g = 2.0 * r / static_cast<double>(n1);
    const double p1 = at(w1, j);
    if (wave) {
      dU(j) += g * p1 * dd_coef.center;
      dU(n1 + j) += g * p1 * dd_coef.side;
      dU(2 * n1 + j) += g * p1 * dd_coef.side;
    } else {
      dU(j) += g * p1 * dt_coef.c0;
      dU(n1 + j) += g * p1 * dt_coef.c1;
      dU(2 * n1 + j) += g * p1 * dt_coef.c2;
    }
    for (int i = 0; i < d; ++i) {
      const double wi = diff_w[static_cast<std::size_t>(i)];
      dU((3 + 2 * i) * n1 + j) -= g * wi * dd_coef.side;
      dU((4 + 2 * i) * n1 + j) -= g * wi * dd_coef.side;
      dU(j) -= g * wi * dd_coef.center;
    }
    dU(j) += g * at(w3, j) * spec.nonlinearity.derivative(u0);
    if (bilinear) {
      dU(j) -= g * at(w4, j) * F(j);
      dF(j) -= g * at(w4, j) * u0;
    } else {
      dF(j) -= g * at(w4, j) * chi;
    }
    if (g1) g1[j] += g * time_term;
    if (per_direction) {
      for (int i = 0; i < d; ++i) {
        dW[static_cast<std::size_t>(w.by_direction[static_cast<std::size_t>(i)])](j) -=
            g * lap_i[static_cast<std::size_t>(i)];
      }
    } else if (g2) {
      g2[j] -= g * lap;
    }
    if (g3) g3[j] += g * nonlinear;
    if (g4) g4[j] -= g * control;
  }

  // Boundary block.
  const double norm = static_cast<double>(nb + n0 + nt);
  const double s = 2.0 * spec.lambda / norm;
  double boundary_sum = 0.0;
  {
    const double* w5 = w.data(WeightRole::lateral);
    double* g5 = grad_of(WeightRole::lateral);
    for (Eigen::Index j = 0; j < nb; ++j) {
      const double ub = U(boundary_off + j);
      const double e = at(w5, j) * ub;
      boundary_sum += e * e;
      if (!with_gradients) continue;
      dU(boundary_off + j) += s * e * at(w5, j);
      if (g5) g5[j] += s * e * ub;
    }
  }

  // (state weight, data weight) pairs on a slice: u(t0, x) against data, and
  // for waves dt u(t0, x) against velocity data.
  const auto slice_terms = [&](const Eigen::MatrixXd& pts, Eigen::Index base, WeightRole state_role,
                               WeightRole data_role, const SpatialFn& data, WeightRole vel_role,
                               WeightRole vel_data_role, const SpatialFn& vel_data) {
    const Eigen::Index n = pts.cols();
    const double* ws = w.data(state_role);
    const double* wd = w.data(data_role);
    double* gs = grad_of(state_role);
    double* gd = grad_of(data_role);
    const double* wv = wave ? w.data(vel_role) : nullptr;
    const double* wvd = wave ? w.data(vel_data_role) : nullptr;
    double* gv = wave ? grad_of(vel_role) : nullptr;
    double* gvd = wave ? grad_of(vel_data_role) : nullptr;
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto x = spatial(pts, j);
      const double us = U(base + j);
      const double target = data(x);
      const double e = at(ws, j) * us - at(wd, j) * target;
      boundary_sum += e * e;
      if (with_gradients) {
        dU(base + j) += s * e * at(ws, j);
        if (gs) gs[j] += s * e * us;
        if (gd) gd[j] -= s * e * target;
      }
      if (!wave) continue;
      const double velocity = forward_dt_quotient(us, U(base + n + j), U(base + 2 * n + j), h);
      const double vtarget = vel_data(x);
      const double ev = at(wv, j) * velocity - at(wvd, j) * vtarget;
      boundary_sum += ev * ev;
      if (with_gradients) {
        const double c = s * ev * at(wv, j);
        dU(base + j) += c * dt_coef.c0;
        dU(base + n + j) += c * dt_coef.c1;
        dU(base + 2 * n + j) += c * dt_coef.c2;
        if (gv) gv[j] += s * ev * velocity;
        if (gvd) gvd[j] -= s * ev * vtarget;
      }
    }
  };
  slice_terms(batch.initial, initial_off, WeightRole::initial_state, WeightRole::initial_data, spec.data.u0,
              WeightRole::initial_velocity, WeightRole::initial_velocity_data, spec.data.u1);
  slice_terms(batch.terminal, terminal_off, WeightRole::terminal_state, WeightRole::terminal_data, spec.data.z0,
              WeightRole::terminal_velocity, WeightRole::terminal_velocity_data, spec.data.z1);

  // Weight deviation penalty.
  double penalty_sum = 0.0;
  for (std::size_t k = 0; k < w.values.size(); ++k) {
    const auto& v = w.values[k];
    const double n = static_cast<double>(v.size());
    penalty_sum += (v.array() - 1.0).square().sum() / n;
    if (with_gradients) dW[k].array() -= spec.rho * 2.0 * (v.array() - 1.0) / n;
  }

  LossEvaluation out;
  out.loss.eq_term = eq_sum / static_cast<double>(n1);
  out.loss.boundary_term = boundary_sum / norm;
  out.loss.penalty_term = penalty_sum;
  out.loss.total = out.loss.eq_term + spec.lambda * out.loss.boundary_term - spec.rho * out.loss.penalty_term;

  if (with_gradients) {
    LossGradients grads;
    grads.u = ParamGrad::zeros_like(u);
    grads.f = ParamGrad::zeros_like(f);
    accumulate_backprop(u, u_tape, dU, grads.u);
    accumulate_backprop(f, f_tape, dF, grads.f);
    if (weights) {
      for (std::size_t k = 0; k < weights->nets.size(); ++k) {
        grads.weights.push_back(ParamGrad::zeros_like(weights->nets[k].params));
        accumulate_backprop(weights->nets[k].params, w.tapes[k], dW[k], grads.weights.back());
      }
    }
    out.gradients = std::move(grads);
  }
  return out;
}

LossBreakdown loss_heat(const ProblemSpec& spec, const TrainBatch& batch, const MlpParams& u,
                        const MlpParams& f, const WeightNetBundle* weights) {
  if (spec.equation != Equation::heat) throw std::invalid_argument("loss_heat called with a wave problem");
  return evaluate_loss(spec, batch, u, f, weights, false).loss;
}

LossBreakdown loss_wave(const ProblemSpec& spec, const TrainBatch& batch, const MlpParams& u,
                        const MlpParams& f, const WeightNetBundle* weights) {
  if (spec.equation != Equation::wave) throw std::invalid_argument("loss_wave called with a heat problem");
  return evaluate_loss(spec, batch, u, f, weights, false).loss;
}

double penalty(const WeightNetBundle& weights, const TrainBatch& batch) {
  double total = 0.0;
  for (const auto& net : weights.nets) {
    const Eigen::VectorXd v = forward_batch(net.params, points_for(sample_set(net.slot.role), batch));
    total += (v.array() - 1.0).square().sum() / static_cast<double>(v.size());
  }
  return total;
}

namespace {

double weight_at(const WeightNetBundle* weights, WeightRole role, int direction, double t,
                 std::span<const double> x) {
  if (!weights) return 1.0;
  const WeightNet* net = weights->find(role, direction);
  if (!net) throw std::invalid_argument("weight bundle lacks " + WeightSlot{role, direction}.name());
  return NetworkField(net->params).value(t, x);
}

}  // namespace

double residual_point(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                      const WeightNetBundle* weights, double t, std::span<const double> x) {
  const double h = spec.fd.h;
  const double time_term = spec.equation == Equation::heat ? fd_dt(u, t, x, h) : fd_dtt(u, t, x, h);
  const LaplacianResult lap = fd_laplacian(u, t, x, h);
  double diffusion = 0.0;
  if (weights && weights->diffusion == DiffusionWeighting::per_direction) {
    for (std::size_t i = 0; i < lap.per_direction.size(); ++i) {
      diffusion += weight_at(weights, WeightRole::diffusion, static_cast<int>(i), t, x) * lap.per_direction[i];
    }
  } else {
    diffusion = weight_at(weights, WeightRole::diffusion, -1, t, x) * lap.total;
  }
  const double u0 = u(t, x);
  const double control = spec.control == ControlKind::bilinear
                             ? f(t, x) * u0
                             : f(t, x) * static_cast<double>(indicator(spec.region, x));
  return weight_at(weights, WeightRole::time, -1, t, x) * time_term - diffusion +
         weight_at(weights, WeightRole::nonlinearity, -1, t, x) * spec.nonlinearity.value(u0) -
         weight_at(weights, WeightRole::control, -1, t, x) * control;
}

double residual_point_heat(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                           const WeightNetBundle* weights, double t, std::span<const double> x) {
  if (spec.equation != Equation::heat) throw std::invalid_argument("heat residual requested for a wave problem");
  return residual_point(spec, u, f, weights, t, x);
}

double residual_point_wave(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                           const WeightNetBundle* weights, double t, std::span<const double> x) {
  if (spec.equation != Equation::wave) throw std::invalid_argument("wave residual requested for a heat problem");
  return residual_point(spec, u, f, weights, t, x);
}

std::string loss_csv_header() { return "iteration,eq_term,boundary_term,penalty_term,total"; }

std::string loss_csv_row(long iteration, const LossBreakdown& loss) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%ld,%.17g,%.17g,%.17g,%.17g", iteration, loss.eq_term, loss.boundary_term,
                loss.penalty_term, loss.total);
  return buf;
}

}  // namespace wpinn
