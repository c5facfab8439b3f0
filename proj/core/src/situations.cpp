#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wpinn/problem.hpp"

namespace wpinn {

namespace {

double euclidean_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

// sin(pi/2 (1 - |x|)^{2.5}); (1 - |x|) is clamped at 0 outside the ball.
double radial_bump(std::span<const double> x) {
  const double r = std::max(0.0, 1.0 - euclidean_norm(x));
  return std::sin(0.5 * std::numbers::pi * std::pow(r, 2.5));
}

double tent_product(std::span<const double> x) {
  double p = 1.0;
  for (double v : x) p *= 1.0 - std::abs(v);
  return p;
}

}  // namespace

std::string to_string(Equation e) { return e == Equation::heat ? "heat" : "wave"; }
std::string to_string(ControlKind c) { return c == ControlKind::internal ? "internal" : "bilinear"; }

Nonlinearity Nonlinearity::quadratic() {
  return {[](double u) { return -u + u * u; }, [](double u) { return -1.0 + 2.0 * u; }};
}

Nonlinearity Nonlinearity::zero() {
  return {[](double) { return 0.0; }, [](double) { return 0.0; }};
}

void ProblemSpec::validate() const {
  if (dim < 1) throw std::invalid_argument("dimension must be >= 1");
  if (domain.dim != dim) throw std::invalid_argument("domain dimension does not match problem dimension");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon T must be positive");
  if (!(lambda > 0.0) || !(rho > 0.0)) throw std::invalid_argument("lambda and rho must be positive");
  if (!(fd.h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  if (!nonlinearity.value || !nonlinearity.derivative) {
    throw std::invalid_argument("nonlinearity needs both value and derivative");
  }
  if (!data.u0 || !data.z0) throw std::invalid_argument("initial and terminal data are required");
  if (equation == Equation::wave && (!data.u1 || !data.z1)) {
    throw std::invalid_argument("wave problems need initial and terminal velocities");
  }
}

double small_cube_halfwidth(int d) {
  const double dd = static_cast<double>(d);
  return std::sqrt(1.0 / dd - 1.0 / (2.0 * dd * dd));
}

ProblemSpec situation(int id, int d) {
  if (id < 1 || id > 8) throw std::out_of_range("situation id must be in 1..8, got " + std::to_string(id));
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");

  const int base = (id - 1) % 4 + 1;
  ProblemSpec s;
  s.dim = d;
  s.equation = (base <= 2) ? Equation::heat : Equation::wave;
  s.control = (id <= 4) ? ControlKind::internal : ControlKind::bilinear;
  s.horizon = (s.equation == Equation::heat) ? 1.0 : 3.0;

  constexpr double e = std::numbers::e;
  switch (base) {
    case 1:
      s.domain = Domain::unit_ball(d);
      s.region = Region::cube_halfwidth(small_cube_halfwidth(d));
      s.data.u0 = [](std::span<const double>) { return 0.0; };
      s.data.z0 = [](std::span<const double> x) { return (e - 1.0) * radial_bump(x); };
      break;
    case 2:
      s.domain = Domain::centered_cube(d);
      s.region = Region::ball(std::vector<double>(static_cast<std::size_t>(d), 0.0), 1.0);
      s.data.u0 = [](std::span<const double> x) { return tent_product(x); };
      s.data.z0 = [](std::span<const double> x) { return e * tent_product(x); };
      break;
    case 3:
      s.domain = Domain::unit_ball(d);
      s.region = Region::complement_ball(std::vector<double>(static_cast<std::size_t>(d), 1.0 / d), 0.75);
      s.data.u0 = [](std::span<const double>) { return 0.0; };
      s.data.u1 = [](std::span<const double>) { return 0.0; };
      s.data.z0 = [](std::span<const double> x) { return (e - 1.0) * radial_bump(x); };
      s.data.z1 = [](std::span<const double> x) { return 2.0 * e * radial_bump(x); };
      break;
    case 4:
      s.domain = Domain::centered_cube(d);
      s.region = Region::complement_cube(small_cube_halfwidth(d));
      s.data.u0 = [](std::span<const double> x) { return tent_product(x); };
      s.data.u1 = [](std::span<const double> x) { return tent_product(x); };
      s.data.z0 = [](std::span<const double> x) { return e * tent_product(x); };
      s.data.z1 = [](std::span<const double> x) { return e * tent_product(x); };
      break;
  }
  s.validate();
  return s;
}

}  // namespace wpinn
