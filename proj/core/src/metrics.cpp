#include "wpinn/metrics.hpp"

#include <cmath>
#include <stdexcept>

#include "wpinn/fd.hpp"

namespace wpinn {

namespace {

struct RootMeanSquare {
  double value = 0.0;
  double std_error = 0.0;
};

RootMeanSquare rms(const Eigen::VectorXd& v) {
  const double n = static_cast<double>(v.size());
  const Eigen::ArrayXd sq = v.array().square();
  const double mean = sq.sum() / n;
  RootMeanSquare r;
  r.value = std::sqrt(mean);
  if (v.size() > 1 && mean > 0.0) {
    const double var = (sq - mean).square().sum() / (n - 1.0);
    r.std_error = std::sqrt(var / n) / (2.0 * r.value);
  }
  return r;
}

Eigen::MatrixXd stacked_time_shifts(const Eigen::MatrixXd& pts, std::initializer_list<double> shifts) {
  Eigen::MatrixXd out(pts.rows(), pts.cols() * static_cast<Eigen::Index>(shifts.size()));
  Eigen::Index off = 0;
  for (double s : shifts) {
    out.middleCols(off, pts.cols()) = pts;
    if (s != 0.0) out.block(0, off, 1, pts.cols()).array() += s;
    off += pts.cols();
  }
  return out;
}

std::span<const double> spatial(const Eigen::MatrixXd& pts, Eigen::Index j) {
  return {pts.col(j).data() + 1, static_cast<std::size_t>(pts.rows() - 1)};
}

Eigen::VectorXd equation_residuals(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                                   const Eigen::MatrixXd& interior) {
  const int d = spec.dim;
  const double h = spec.fd.h;
  const bool wave = spec.equation == Equation::wave;
  const Eigen::Index n = interior.cols();

  Eigen::MatrixXd probes(d + 1, (3 + 2 * d) * n);
  Eigen::Index off = 0;
  const auto put = [&](Eigen::Index row, double shift) {
    probes.middleCols(off, n) = interior;
    if (shift != 0.0) probes.block(row, off, 1, n).array() += shift;
    off += n;
  };
  put(0, 0.0);
  put(0, h);
  put(0, wave ? -h : 2.0 * h);
  for (int i = 0; i < d; ++i) {
    put(i + 1, h);
    put(i + 1, -h);
  }
  const Eigen::VectorXd U = u.values(probes);
  const Eigen::VectorXd F = f.values(interior);

  Eigen::VectorXd res(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double u0 = U(j);
    const double time_term = wave ? second_difference_quotient(U(2 * n + j), u0, U(n + j), h)
                                  : forward_dt_quotient(u0, U(n + j), U(2 * n + j), h);
    double lap = 0.0;
    for (int i = 0; i < d; ++i) {
      lap += second_difference_quotient(U((4 + 2 * i) * n + j), u0, U((3 + 2 * i) * n + j), h);
    }
    const double control = spec.control == ControlKind::bilinear
                               ? F(j) * u0
                               : F(j) * static_cast<double>(indicator(spec.region, spatial(interior, j)));
    res(j) = time_term - lap + spec.nonlinearity.value(u0) - control;
  }
  return res;
}

// Position mismatch and, for waves, velocity mismatch on one slice.
std::pair<double, double> slice_errors(const ProblemSpec& spec, const SpaceTimeField& u,
                                       const Eigen::MatrixXd& slice, const SpatialFn& position,
                                       const SpatialFn& velocity, bool with_velocity) {
  const double h = spec.fd.h;
  const Eigen::Index n = slice.cols();
  const Eigen::VectorXd U = with_velocity ? u.values(stacked_time_shifts(slice, {0.0, h, 2.0 * h}))
                                          : u.values(slice);
  Eigen::VectorXd pos(n), vel(with_velocity ? n : 0);
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto x = spatial(slice, j);
    pos(j) = U(j) - position(x);
    if (with_velocity) vel(j) = forward_dt_quotient(U(j), U(n + j), U(2 * n + j), h) - velocity(x);
  }
  return {rms(pos).value, with_velocity ? rms(vel).value : 0.0};
}

ErrorReport evaluate(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f, Sampler& rng,
                     int n3, int n4) {
  spec.validate();
  if (n3 < 1 || n4 < 1) throw std::invalid_argument("test point counts must be >= 1");
  const bool wave = spec.equation == Equation::wave;

  const Eigen::MatrixXd interior = rng.interior(spec.domain, spec.horizon, n3);
  const Eigen::MatrixXd boundary = rng.boundary(spec.domain, spec.horizon, n3);
  const Eigen::MatrixXd initial = rng.slice(spec.domain, 0.0, n4);
  const Eigen::MatrixXd terminal = rng.slice(spec.domain, spec.horizon, n4);

  ErrorReport r;
  r.n3 = n3;
  r.n4 = n4;
  r.equation = spec.equation;
  r.control = spec.control;

  const RootMeanSquare eq = rms(equation_residuals(spec, u, f, interior));
  r.equation_error = eq.value;
  r.equation_std_error = eq.std_error;
  r.lateral_error = rms(u.values(boundary)).value;
  std::tie(r.initial_error, r.initial_velocity_error) =
      slice_errors(spec, u, initial, spec.data.u0, spec.data.u1, wave);
  std::tie(r.terminal_error, r.terminal_velocity_error) =
      slice_errors(spec, u, terminal, spec.data.z0, spec.data.z1, wave);

  r.boundary_error = r.lateral_error + r.initial_error + r.terminal_error;
  if (wave) r.boundary_error += r.initial_velocity_error + r.terminal_velocity_error;
  r.total = r.equation_error + r.boundary_error;
  return r;
}

}  // namespace

ErrorReport test_error_heat(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                            Sampler& rng, int n3, int n4) {
  if (spec.equation != Equation::heat) throw std::invalid_argument("heat test error requested for a wave problem");
  return evaluate(spec, u, f, rng, n3, n4);
}

ErrorReport test_error_wave(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                            Sampler& rng, int n3, int n4) {
  if (spec.equation != Equation::wave) throw std::invalid_argument("wave test error requested for a heat problem");
  return evaluate(spec, u, f, rng, n3, n4);
}

ErrorReport test_error(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f, Sampler& rng,
                       int n3, int n4) {
  return evaluate(spec, u, f, rng, n3, n4);
}

nlohmann::json to_json(const ErrorReport& r, int situation, const std::string& method, std::uint64_t seed) {
  nlohmann::json j;
  j["total"] = r.total;
  j["equation_error"] = r.equation_error;
  j["boundary_error"] = r.boundary_error;
  j["N3"] = r.n3;
  j["N4"] = r.n4;
  j["situation"] = situation;
  j["method"] = method;
  j["seed"] = seed;
  j["equation"] = to_string(r.equation);
  j["control"] = to_string(r.control);
  j["terms"] = {{"lateral", r.lateral_error},
                {"initial", r.initial_error},
                {"terminal", r.terminal_error},
                {"initial_velocity", r.initial_velocity_error},
                {"terminal_velocity", r.terminal_velocity_error},
                {"equation_std_error", r.equation_std_error}};
  return j;
}

}  // namespace wpinn
