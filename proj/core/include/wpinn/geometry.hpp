#pragma once

// Spatial domains, control regions and uniform samplers for space-time
// training/test points.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wpinn {

enum class DomainKind : std::uint8_t { unit_ball, centered_cube };

// Omega: the open unit ball or (-1, 1)^d.
struct Domain {
  DomainKind kind = DomainKind::unit_ball;
  int dim = 1;

  static Domain unit_ball(int d);
  static Domain centered_cube(int d);

  bool contains(std::span<const double> x) const;           // open set
  double boundary_distance(std::span<const double> x) const;  // 0 on the boundary
};

enum class RegionKind : std::uint8_t {
  cube_halfwidth,   // [-a, a]^d
  ball,             // closed ball(center, radius)
  complement_ball,  // Omega minus the closed ball(center, radius)
  complement_cube,  // Omega minus [-a, a]^d
  whole_domain,
  empty,
};

// The control region omega, interpreted relative to a Domain.
struct Region {
  RegionKind kind = RegionKind::whole_domain;
  double halfwidth = 0.0;
  std::vector<double> center;
  double radius = 0.0;

  static Region cube_halfwidth(double a);
  static Region ball(std::vector<double> center, double radius);
  static Region complement_ball(std::vector<double> center, double radius);
  static Region complement_cube(double a);
  static Region whole_domain();
  static Region empty();
};

// 1 iff x lies in omega. Edges count as inside for cube/ball kinds and as
// excluded for complement kinds (the removed set is closed).
int indicator(const Region& region, std::span<const double> x);

using SpatialFn = std::function<double(std::span<const double>)>;

struct DataFunctions {
  SpatialFn u0;  // initial state
  SpatialFn z0;  // terminal state
  SpatialFn u1;  // initial velocity (wave only)
  SpatialFn z1;  // terminal velocity (wave only)
};

// Space-time point sets; every matrix is (d+1) x count, row 0 holds time.
struct TrainBatch {
  Eigen::MatrixXd interior;
  Eigen::MatrixXd boundary;
  Eigen::MatrixXd initial;
  Eigen::MatrixXd terminal;

  int dim() const { return static_cast<int>(interior.rows()) - 1; }
  Eigen::Index n1() const { return interior.cols(); }
  Eigen::Index n2() const { return initial.cols(); }
};

// N2 = floor(N1 / d).
int slice_count(int n1, int d);

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed, std::uint64_t stream = 0);

  Eigen::MatrixXd interior(const Domain& domain, double horizon, int n);
  Eigen::MatrixXd boundary(const Domain& domain, double horizon, int n);
  Eigen::MatrixXd slice(const Domain& domain, double t0, int n);

  // Interior and boundary get n1 points each, the two slices floor(n1/d).
  TrainBatch batch(const Domain& domain, double horizon, int n1);

  std::mt19937_64& engine() { return gen_; }

 private:
  double uniform_open(double lo, double hi);
  void point_in_domain(const Domain& domain, double* x);
  void point_on_boundary(const Domain& domain, double* x);

  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

// CSV dump with columns role,t,x_1..x_d.
std::string batch_to_csv(const TrainBatch& batch);

}  // namespace wpinn
