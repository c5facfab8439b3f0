#pragma once

// Finite-difference stencils applied to fields u(t, x):
//
//   dt   u ~ (-u(t+2h) + 4u(t+h) - 3u(t)) / (2h)        forward, one-sided
//   dtt  u ~ (u(t+h) - 2u(t) + u(t-h)) / h^2
//   dxixi u ~ (u(x+h e_i) - 2u(x) + u(x-h e_i)) / h^2
//   lap  u = sum_i dxixi u
//
// No domain clamping: stencils may probe outside the domain, the fields
// involved are defined on all of R^{d+1}. The quotient helpers below are the
// single arithmetic definition shared by the pointwise and batched paths.

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wpinn {

struct FdConfig {
  double h = 1e-3;
};

inline double forward_dt_quotient(double u0, double u1, double u2, double h) {
  return (-u2 + 4.0 * u1 - 3.0 * u0) / (2.0 * h);
}

inline double second_difference_quotient(double minus, double center, double plus, double h) {
  return (plus - 2.0 * center + minus) / (h * h);
}

// Derivatives of the quotients with respect to each sample.
struct ForwardDtCoefficients {
  double c0, c1, c2;
};
inline ForwardDtCoefficients forward_dt_coefficients(double h) {
  return {-3.0 / (2.0 * h), 4.0 / (2.0 * h), -1.0 / (2.0 * h)};
}
struct SecondDifferenceCoefficients {
  double side, center;
};
inline SecondDifferenceCoefficients second_difference_coefficients(double h) {
  return {1.0 / (h * h), -2.0 / (h * h)};
}

template <class Field>
double fd_dt(const Field& u, double t, std::span<const double> x, double h) {
  return forward_dt_quotient(u(t, x), u(t + h, x), u(t + 2.0 * h, x), h);
}

template <class Field>
double fd_dtt(const Field& u, double t, std::span<const double> x, double h) {
  return second_difference_quotient(u(t - h, x), u(t, x), u(t + h, x), h);
}

// `i` is a zero-based coordinate index.
template <class Field>
double fd_dxixi(const Field& u, double t, std::span<const double> x, std::size_t i, double h) {
  if (i >= x.size()) {
    throw std::out_of_range("coordinate index " + std::to_string(i) + " out of range for d=" +
                            std::to_string(x.size()));
  }
  std::vector<double> shifted(x.begin(), x.end());
  shifted[i] = x[i] + h;
  const double plus = u(t, std::span<const double>(shifted));
  shifted[i] = x[i] - h;
  const double minus = u(t, std::span<const double>(shifted));
  return second_difference_quotient(minus, u(t, x), plus, h);
}

struct LaplacianResult {
  double total = 0.0;
  std::vector<double> per_direction;
};

template <class Field>
LaplacianResult fd_laplacian(const Field& u, double t, std::span<const double> x, double h) {
  LaplacianResult r;
  r.per_direction.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    r.per_direction.push_back(fd_dxixi(u, t, x, i, h));
    r.total += r.per_direction.back();
  }
  return r;
}

// Batched probes: copies of a (d+1) x n point matrix with a shifted row.
// Row 0 is time, row i+1 is coordinate x_i.
inline Eigen::MatrixXd shifted_time(const Eigen::MatrixXd& points, double dt) {
  Eigen::MatrixXd out = points;
  out.row(0).array() += dt;
  return out;
}

inline Eigen::MatrixXd shifted_coordinate(const Eigen::MatrixXd& points, Eigen::Index i, double dx) {
  Eigen::MatrixXd out = points;
  out.row(i + 1).array() += dx;
  return out;
}

}  // namespace wpinn
