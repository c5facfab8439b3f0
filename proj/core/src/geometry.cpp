#include "wpinn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace wpinn {

namespace {

double squared_norm(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return s;
}

double max_abs(std::span<const double> x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

bool in_closed_ball(std::span<const double> x, const std::vector<double>& center, double radius) {
  if (center.size() != x.size()) throw std::invalid_argument("region center has wrong dimension");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - center[i];
    s += diff * diff;
  }
  return s <= radius * radius;
}

}  // namespace

Domain Domain::unit_ball(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  return {DomainKind::unit_ball, d};
}

Domain Domain::centered_cube(int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  return {DomainKind::centered_cube, d};
}

bool Domain::contains(std::span<const double> x) const {
  switch (kind) {
    case DomainKind::unit_ball: return squared_norm(x) < 1.0;
    case DomainKind::centered_cube: return max_abs(x) < 1.0;
  }
  return false;
}

double Domain::boundary_distance(std::span<const double> x) const {
  switch (kind) {
    case DomainKind::unit_ball: return std::abs(std::sqrt(squared_norm(x)) - 1.0);
    case DomainKind::centered_cube: return std::abs(max_abs(x) - 1.0);
  }
  return 0.0;
}

Region Region::cube_halfwidth(double a) {
  if (!(a > 0.0)) throw std::invalid_argument("cube half-width must be positive");
  Region r;
  r.kind = RegionKind::cube_halfwidth;
  r.halfwidth = a;
  return r;
}

Region Region::ball(std::vector<double> center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
  Region r;
  r.kind = RegionKind::ball;
  r.center = std::move(center);
  r.radius = radius;
  return r;
}

Region Region::complement_ball(std::vector<double> center, double radius) {
  Region r = ball(std::move(center), radius);
  r.kind = RegionKind::complement_ball;
  return r;
}

Region Region::complement_cube(double a) {
  Region r = cube_halfwidth(a);
  r.kind = RegionKind::complement_cube;
  return r;
}

Region Region::whole_domain() { return {}; }

Region Region::empty() {
  Region r;
  r.kind = RegionKind::empty;
  return r;
}

int indicator(const Region& region, std::span<const double> x) {
  switch (region.kind) {
    case RegionKind::cube_halfwidth: return max_abs(x) <= region.halfwidth ? 1 : 0;
    case RegionKind::ball: return in_closed_ball(x, region.center, region.radius) ? 1 : 0;
    case RegionKind::complement_ball: return in_closed_ball(x, region.center, region.radius) ? 0 : 1;
    case RegionKind::complement_cube: return max_abs(x) <= region.halfwidth ? 0 : 1;
    case RegionKind::whole_domain: return 1;
    case RegionKind::empty: return 0;
  }
  return 0;
}

int slice_count(int n1, int d) {
  if (d < 1) throw std::invalid_argument("dimension must be >= 1");
  return n1 / d;
}

Sampler::Sampler(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  gen_.seed(seq);
}

double Sampler::uniform_open(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  for (;;) {
    const double v = dist(gen_);
    if (v > lo && v < hi) return v;
  }
}

void Sampler::point_in_domain(const Domain& domain, double* x) {
  const int d = domain.dim;
  const std::span<const double> view(x, static_cast<std::size_t>(d));
  if (domain.kind == DomainKind::centered_cube) {
    for (int i = 0; i < d; ++i) x[i] = uniform_open(-1.0, 1.0);
    return;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  do {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      x[i] = normal_(gen_);
      s += x[i] * x[i];
    }
    if (s == 0.0) continue;
    const double r = std::pow(unit(gen_), 1.0 / d) / std::sqrt(s);
    for (int i = 0; i < d; ++i) x[i] *= r;
  } while (!domain.contains(view));
}

void Sampler::point_on_boundary(const Domain& domain, double* x) {
  const int d = domain.dim;
  if (domain.kind == DomainKind::centered_cube) {
    std::uniform_int_distribution<int> face(0, 2 * d - 1);
    const int f = face(gen_);
    for (int i = 0; i < d; ++i) x[i] = uniform_open(-1.0, 1.0);
    x[f / 2] = (f % 2 == 0) ? -1.0 : 1.0;
    return;
  }
  double s = 0.0;
  do {
    s = 0.0;
    for (int i = 0; i < d; ++i) {
      x[i] = normal_(gen_);
      s += x[i] * x[i];
    }
  } while (s == 0.0);
  const double inv = 1.0 / std::sqrt(s);
  for (int i = 0; i < d; ++i) x[i] *= inv;
}

Eigen::MatrixXd Sampler::interior(const Domain& domain, double horizon, int n) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  Eigen::MatrixXd pts(domain.dim + 1, n);
  for (int j = 0; j < n; ++j) {
    pts(0, j) = uniform_open(0.0, horizon);
    point_in_domain(domain, pts.col(j).data() + 1);
  }
  return pts;
}

Eigen::MatrixXd Sampler::boundary(const Domain& domain, double horizon, int n) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  Eigen::MatrixXd pts(domain.dim + 1, n);
  for (int j = 0; j < n; ++j) {
    pts(0, j) = uniform_open(0.0, horizon);
    point_on_boundary(domain, pts.col(j).data() + 1);
  }
  return pts;
}

Eigen::MatrixXd Sampler::slice(const Domain& domain, double t0, int n) {
  if (n < 1) throw std::invalid_argument("sample count must be >= 1");
  Eigen::MatrixXd pts(domain.dim + 1, n);
  for (int j = 0; j < n; ++j) {
    pts(0, j) = t0;
    point_in_domain(domain, pts.col(j).data() + 1);
  }
  return pts;
}

TrainBatch Sampler::batch(const Domain& domain, double horizon, int n1) {
  const int n2 = slice_count(n1, domain.dim);
  if (n2 < 1) throw std::invalid_argument("N1 must be at least d so that N2 >= 1");
  TrainBatch b;
  b.interior = interior(domain, horizon, n1);
  b.boundary = boundary(domain, horizon, n1);
  b.initial = slice(domain, 0.0, n2);
  b.terminal = slice(domain, horizon, n2);
  return b;
}

std::string batch_to_csv(const TrainBatch& batch) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  const int d = batch.dim();
  out << "role,t";
  for (int i = 1; i <= d; ++i) out << ",x_" << i;
  out << '\n';
  const auto emit = [&](const char* role, const Eigen::MatrixXd& pts) {
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      out << role;
      for (Eigen::Index r = 0; r < pts.rows(); ++r) out << ',' << pts(r, j);
      out << '\n';
    }
  };
  emit("interior", batch.interior);
  emit("boundary", batch.boundary);
  emit("initial", batch.initial);
  emit("terminal", batch.terminal);
  return out.str();
}

}  // namespace wpinn
