#pragma once

// Test-time errors on freshly sampled points. Every norm is a Monte-Carlo
// L2 norm with respect to the normalized measure of its set:
// sqrt(mean of squares).
//
//   heat: H = |P u - c| + |u|_lateral + |u(0) - u0| + |u(T) - z0|
//   wave: H adds |dt u(0) - u1| + |dt u(T) - z1|
//
// with c = f 1_omega (internal) or f u (bilinear). The first term is the
// equation error, the rest the boundary error.

#include <cstdint>
#include <string>

#include <nlohmann/json.hpp>

#include "wpinn/field.hpp"
#include "wpinn/geometry.hpp"
#include "wpinn/problem.hpp"

namespace wpinn {

struct ErrorReport {
  double total = 0.0;
  double equation_error = 0.0;
  double boundary_error = 0.0;

  double lateral_error = 0.0;
  double initial_error = 0.0;
  double terminal_error = 0.0;
  double initial_velocity_error = 0.0;   // wave only
  double terminal_velocity_error = 0.0;  // wave only
  double equation_std_error = 0.0;       // Monte-Carlo standard error of equation_error

  int n3 = 0;
  int n4 = 0;
  Equation equation = Equation::heat;
  ControlKind control = ControlKind::internal;
};

inline constexpr int kDefaultTestInterior = 10000;
inline constexpr int kDefaultTestSlice = 1000;

ErrorReport test_error_heat(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                            Sampler& rng, int n3 = kDefaultTestInterior, int n4 = kDefaultTestSlice);
ErrorReport test_error_wave(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f,
                            Sampler& rng, int n3 = kDefaultTestInterior, int n4 = kDefaultTestSlice);
ErrorReport test_error(const ProblemSpec& spec, const SpaceTimeField& u, const SpaceTimeField& f, Sampler& rng,
                       int n3 = kDefaultTestInterior, int n4 = kDefaultTestSlice);

// {total, equation_error, boundary_error, N3, N4, situation, method, seed, ...}
nlohmann::json to_json(const ErrorReport& report, int situation, const std::string& method, std::uint64_t seed);

}  // namespace wpinn
