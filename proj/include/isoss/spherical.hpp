// Copyright 2026 The isoss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// \file
/// \brief O(d)-invariant processes on the unit sphere: Brownian motion with
/// generator c_sph * (Laplace-Beltrami) plus rotation-invariant jumps.

#ifndef ISOSS_SPHERICAL_HPP_
#define ISOSS_SPHERICAL_HPP_

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "isoss/path.hpp"
#include "isoss/rng.hpp"
#include "isoss/vec.hpp"

namespace isoss {

class UnitVector {
 public:
  explicit UnitVector(Point v) : v_(std::move(v)) {
    if (v_.size() < 2) throw std::invalid_argument("UnitVector: dimension must be >= 2");
    if (std::abs(norm(v_) - 1.0) > 1e-12) throw std::invalid_argument("UnitVector: not unit norm");
  }

  static UnitVector normalized(Point v) {
    const double n = norm(v);
    if (!(n > 0.0)) throw std::domain_error("UnitVector: cannot normalize zero vector");
    for (auto& c : v) c /= n;
    return UnitVector(std::move(v));
  }

  const Point& value() const { return v_; }
  std::size_t dim() const { return v_.size(); }

 private:
  Point v_;
};

/// Angular jumps below this geodesic size are discarded.
inline constexpr double kAngularCutoff = 1e-3;

/// Law of the geodesic jump angle on (0, pi].
struct AngleLaw {
  enum class Kind { point_mass, uniform, beta };

  Kind kind = Kind::uniform;
  double delta = std::numbers::pi / 2;  // point_mass atom
  double a = 1.0;                       // beta: angle = pi * Beta(a, b)
  double b = 1.0;

  static AngleLaw point_mass(double d) { return {Kind::point_mass, d, 1.0, 1.0}; }
  static AngleLaw uniform() { return {Kind::uniform, std::numbers::pi / 2, 1.0, 1.0}; }
  static AngleLaw beta(double a, double b) { return {Kind::beta, std::numbers::pi / 2, a, b}; }

  void validate() const {
    switch (kind) {
      case Kind::point_mass:
        if (!(delta > 0.0 && delta <= std::numbers::pi))
          throw std::invalid_argument("AngleLaw: point mass must lie in (0, pi]");
        break;
      case Kind::uniform: break;
      case Kind::beta:
        if (!(a > 0.0) || !(b > 0.0))
          throw std::invalid_argument("AngleLaw: beta parameters must be positive");
        break;
    }
  }

  double sample(Rng& rng) const {
    switch (kind) {
      case Kind::point_mass: return delta;
      case Kind::uniform: return std::numbers::pi * uniform_open(rng);
      case Kind::beta: {
        std::gamma_distribution<double> ga(a, 1.0);
        std::gamma_distribution<double> gb(b, 1.0);
        const double x = ga(rng);
        const double y = gb(rng);
        return std::numbers::pi * x / (x + y);
      }
    }
    return delta;
  }

  friend bool operator==(const AngleLaw&, const AngleLaw&) = default;
};

inline const char* to_string(AngleLaw::Kind k) {
  switch (k) {
    case AngleLaw::Kind::point_mass: return "point_mass";
    case AngleLaw::Kind::uniform: return "uniform";
    case AngleLaw::Kind::beta: return "beta";
  }
  return "?";
}

struct AngularSpec {
  std::size_t dim = 2;
  double c_sph = 0.0;
  double jump_rate = 0.0;
  AngleLaw jump_angle_law = AngleLaw::uniform();

  void validate() const {
    if (dim < 2) throw std::invalid_argument("AngularSpec: dim must be >= 2");
    if (!(c_sph >= 0.0)) throw std::invalid_argument("AngularSpec: c_sph must be >= 0");
    if (!(jump_rate >= 0.0)) throw std::invalid_argument("AngularSpec: jump_rate must be >= 0");
    jump_angle_law.validate();
  }

  friend bool operator==(const AngularSpec&, const AngularSpec&) = default;
};

namespace detail {

// Standard Gaussian in the tangent space at theta (projected ambient normal).
inline Point tangent_gaussian(const Point& theta, Rng& rng) {
  Point g(theta.size());
  for (auto& c : g) c = standard_normal(rng);
  const double along = dot(g, theta);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] -= along * theta[i];
  return g;
}

// Move from theta along the geodesic with unit tangent u for arc length s.
inline Point geodesic_move(const Point& theta, const Point& u, double s) {
  const double c = std::cos(s);
  const double sn = std::sin(s);
  Point out(theta.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = c * theta[i] + sn * u[i];
  const double n = norm(out);
  for (auto& v : out) v /= n;
  return out;
}

}  // namespace detail

/// One geodesic random-walk step for the generator c_sph * Laplace-Beltrami.
inline UnitVector sbm_step(const UnitVector& theta, double c_sph, double h, Rng& rng) {
  if (c_sph == 0.0) return theta;
  Point g = detail::tangent_gaussian(theta.value(), rng);
  const double gn = norm(g);
  if (!(gn > 0.0)) return theta;
  for (auto& c : g) c /= gn;
  return UnitVector(detail::geodesic_move(theta.value(), g, std::sqrt(2.0 * c_sph * h) * gn));
}

/// Rotate theta by geodesic angle delta towards a uniformly random tangent
/// direction.
inline UnitVector sample_angular_jump(const UnitVector& theta, double delta, Rng& rng) {
  if (!(delta > 0.0 && delta <= std::numbers::pi))
    throw std::invalid_argument("sample_angular_jump: delta must lie in (0, pi]");
  Point u;
  double un = 0.0;
  do {
    u = detail::tangent_gaussian(theta.value(), rng);
    un = norm(u);
  } while (!(un > 0.0));
  for (auto& c : u) c /= un;
  return UnitVector(detail::geodesic_move(theta.value(), u, delta));
}

/// Angular driver advanced on an externally chosen timeline. Diffusion and
/// the compound-Poisson clock (with its marks) draw from separate engines.
class AngularDriver {
 public:
  AngularDriver(const AngularSpec& spec, UnitVector theta0, Rng& diffusion, Rng& clock)
      : spec_(spec), theta_(std::move(theta0)), diffusion_(diffusion), clock_(clock) {
    spec_.validate();
    if (theta_.dim() != spec_.dim) throw std::invalid_argument("AngularDriver: dimension mismatch");
    next_event_ = spec_.jump_rate > 0.0 ? exponential(clock_, spec_.jump_rate) : kInfinity;
  }

  double next_event_time() const { return next_event_; }
  const UnitVector& state() const { return theta_; }

  void diffuse(double dt) {
    if (dt > 0.0) theta_ = sbm_step(theta_, spec_.c_sph, dt, diffusion_);
  }

  /// Fires the pending event. Returns false when the sampled angle falls
  /// below the cutoff and the jump is discarded.
  bool fire() {
    const double now = next_event_;
    next_event_ = now + exponential(clock_, spec_.jump_rate);
    const double delta = spec_.jump_angle_law.sample(clock_);
    if (delta < kAngularCutoff) return false;
    theta_ = sample_angular_jump(theta_, delta, clock_);
    return true;
  }

 private:
  AngularSpec spec_;
  UnitVector theta_;
  Rng& diffusion_;
  Rng& clock_;
  double next_event_;
};

/// Grid times k*h for k = 0..n with the last time clamped to t_end.
inline std::vector<double> time_grid(double t_end, double h) {
  if (!(t_end > 0.0) || !(h > 0.0)) throw std::invalid_argument("time_grid: t_end and h must be positive");
  const auto n = static_cast<std::size_t>(std::ceil(t_end / h - 1e-9));
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (std::size_t k = 0; k < n; ++k) grid.push_back(static_cast<double>(k) * h);
  grid.push_back(t_end);
  return grid;
}

/// O(d)-invariant Feller process on S^{d-1}, embedded in R^d.
inline CadlagPath simulate_angular(const AngularSpec& spec, const UnitVector& theta0, double t_end,
                                   double h, Rng& rng) {
  AngularDriver drv(spec, theta0, rng, rng);
  PathBuilder out(spec.dim, theta0.value());
  const auto grid = time_grid(t_end, h);
  double now = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    while (drv.next_event_time() < grid[k]) {
      const double te = drv.next_event_time();
      drv.diffuse(te - now);
      now = te;
      Point left = drv.state().value();
      if (drv.fire()) out.push_jump(te, std::move(left), drv.state().value());
    }
    drv.diffuse(grid[k] - now);
    now = grid[k];
    out.push(now, drv.state().value());
  }
  return std::move(out).finish();
}

}  // namespace isoss

#endif  // ISOSS_SPHERICAL_HPP_
