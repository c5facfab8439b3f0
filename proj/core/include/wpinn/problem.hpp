#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "wpinn/fd.hpp"
#include "wpinn/geometry.hpp"

namespace wpinn {

enum class Equation : std::uint8_t { heat, wave };
enum class ControlKind : std::uint8_t { internal, bilinear };

std::string to_string(Equation e);
std::string to_string(ControlKind c);

// v(u) together with v'(u), which the loss gradient needs.
struct Nonlinearity {
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  // v(u) = -u + u^2
  static Nonlinearity quadratic();
  static Nonlinearity zero();
};

struct ProblemSpec {
  Equation equation = Equation::heat;
  ControlKind control = ControlKind::internal;
  int dim = 1;
  double horizon = 1.0;  // T
  Domain domain;
  Region region;
  DataFunctions data;
  Nonlinearity nonlinearity = Nonlinearity::quadratic();
  double lambda = 1.0;
  double rho = 1.0;
  FdConfig fd;

  // Throws std::invalid_argument on inconsistent fields.
  void validate() const;
};

// The eight reference configurations at dimension d.
//   1, 2: heat, internal control (T = 1)     3, 4: wave, internal control (T = 3)
//   5, 6: heat, bilinear control             7, 8: wave, bilinear control
// 5..8 reuse the domain, region and data of 1..4.
ProblemSpec situation(int id, int d);

// sqrt(1/d - 1/(2 d^2)), the half-width of the small cube used by 1 and 4.
double small_cube_halfwidth(int d);

}  // namespace wpinn
