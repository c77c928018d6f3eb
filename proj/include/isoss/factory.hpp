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
/// \brief Constructors for the three process families:
///
///  - simulate_invariant: the multiplicatively invariant, isotropic process
///    xbar_t = rho_t * xi_t with rho a multiplicative Levy process and xi an
///    independent O(d)-invariant spherical process, killed at rate gamma;
///  - build_self_similar: the alpha-self-similar skew product x_t obtained
///    from xbar by the inverse Lamperti time change;
///  - simulate_isotropic_stable: the symmetric isotropic beta-stable Levy
///    process, whose radial and angular parts jump together.

#ifndef ISOSS_FACTORY_HPP_
#define ISOSS_FACTORY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "isoss/lamperti.hpp"
#include "isoss/path.hpp"
#include "isoss/rng.hpp"
#include "isoss/spherical.hpp"
#include "isoss/vec.hpp"

namespace isoss {

/// Law of log-radial jump sizes u (the radius is multiplied by e^u).
struct RadialJumpLaw {
  enum class Kind { point_mass, two_point, normal, uniform };

  Kind kind = Kind::normal;
  double p1 = 0.0;  // point_mass/two_point: u; normal: mean; uniform: lower
  double p2 = 1.0;  // normal: sd; uniform: upper

  static RadialJumpLaw point_mass(double u) { return {Kind::point_mass, u, 0.0}; }
  /// +u or -u with probability 1/2 each.
  static RadialJumpLaw two_point(double u) { return {Kind::two_point, u, 0.0}; }
  static RadialJumpLaw normal(double mean, double sd) { return {Kind::normal, mean, sd}; }
  static RadialJumpLaw uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }

  void validate() const {
    switch (kind) {
      case Kind::point_mass:
      case Kind::two_point:
        if (p1 == 0.0 || !std::isfinite(p1))
          throw std::invalid_argument("RadialJumpLaw: atom at zero is not allowed");
        break;
      case Kind::normal:
        if (!(p2 > 0.0)) throw std::invalid_argument("RadialJumpLaw: normal sd must be positive");
        break;
      case Kind::uniform:
        if (!(p2 > p1)) throw std::invalid_argument("RadialJumpLaw: uniform needs lower < upper");
        break;
    }
  }

  double sample(Rng& rng) const {
    switch (kind) {
      case Kind::point_mass: return p1;
      case Kind::two_point: return uniform_open(rng) < 0.5 ? -p1 : p1;
      case Kind::normal: return p1 + p2 * standard_normal(rng);
      case Kind::uniform: return p1 + (p2 - p1) * uniform_open(rng);
    }
    return p1;
  }

  friend bool operator==(const RadialJumpLaw&, const RadialJumpLaw&) = default;
};

inline const char* to_string(RadialJumpLaw::Kind k) {
  switch (k) {
    case RadialJumpLaw::Kind::point_mass: return "point_mass";
    case RadialJumpLaw::Kind::two_point: return "two_point";
    case RadialJumpLaw::Kind::normal: return "normal";
    case RadialJumpLaw::Kind::uniform: return "uniform";
  }
  return "?";
}

/// Normal-form generator data of a G-invariant process on E.
///
/// In log-radial coordinate u = log|x| the radial part has generator
/// (a11/2) d^2/du^2 + c1 d/du plus jumps at rate radial_jump_rate with sizes
/// from radial_jump_law. Jumps are not compensated, so c1 is the drift of the
/// simulated log-radius. The angular part is `angular`.
struct GeneratorSpec {
  std::size_t dim = 2;
  double alpha = 1.0;
  double a11 = 0.0;
  double c1 = 0.0;
  AngularSpec angular{};
  double radial_jump_rate = 0.0;
  RadialJumpLaw radial_jump_law{};
  double gamma = 0.0;

  void validate() const {
    if (dim < 2) throw std::invalid_argument("GeneratorSpec: dim must be >= 2");
    Alpha{alpha};
    if (!(a11 >= 0.0)) throw std::invalid_argument("GeneratorSpec: a11 must be >= 0");
    if (!std::isfinite(c1)) throw std::invalid_argument("GeneratorSpec: c1 must be finite");
    if (!(radial_jump_rate >= 0.0))
      throw std::invalid_argument("GeneratorSpec: radial_jump_rate must be >= 0");
    if (!(gamma >= 0.0)) throw std::invalid_argument("GeneratorSpec: gamma must be >= 0");
    if (angular.dim != dim) throw std::invalid_argument("GeneratorSpec: angular.dim != dim");
    angular.validate();
    radial_jump_law.validate();
  }

  friend bool operator==(const GeneratorSpec&, const GeneratorSpec&) = default;
};

/// Symmetric isotropic beta-stable Levy process started at x0.
///
/// Levy measure: rho^{-1-beta} d(rho) times the uniform probability on
/// directions. Jumps longer than eps_trunc are simulated exactly; the rest
/// are replaced by Brownian motion with the same covariance.
struct StableSpec {
  std::size_t dim = 2;
  double beta = 1.0;
  double eps_trunc = 0.01;
  Point x0{1.0, 0.0};

  void validate() const {
    if (dim < 2) throw std::invalid_argument("StableSpec: dim must be >= 2");
    if (!(beta > 0.0 && beta < 2.0)) throw std::invalid_argument("StableSpec: beta must lie in (0, 2)");
    if (!(eps_trunc > 0.0)) throw std::invalid_argument("StableSpec: eps_trunc must be positive");
    if (x0.size() != dim) throw std::invalid_argument("StableSpec: x0 has wrong dimension");
    if (!(norm(x0) > 0.0)) throw std::invalid_argument("StableSpec: x0 must be nonzero");
  }

  /// Rate of jumps longer than eps_trunc.
  double large_jump_rate() const { return std::pow(eps_trunc, -beta) / beta; }

  /// Per-coordinate variance rate of the jumps shorter than eps_trunc.
  double small_jump_variance() const {
    return std::pow(eps_trunc, 2.0 - beta) / ((2.0 - beta) * static_cast<double>(dim));
  }

  friend bool operator==(const StableSpec&, const StableSpec&) = default;
};

/// Radii outside [kRadiusFloor, kRadiusCeiling] end the path: it has left E
/// for numerical purposes.
inline constexpr double kRadiusFloor = 1e-12;
inline constexpr double kRadiusCeiling = 1e12;

/// Log-radial Levy driver on an externally chosen timeline.
class RadialDriver {
 public:
  RadialDriver(const GeneratorSpec& spec, double r0, Rng& diffusion, Rng& clock)
      : spec_(spec), r0_(r0), diffusion_(diffusion), clock_(clock) {
    next_event_ = spec_.radial_jump_rate > 0.0 ? exponential(clock_, spec_.radial_jump_rate) : kInfinity;
  }

  double next_event_time() const { return next_event_; }
  /// log(rho_t / r0).
  double log_increment() const { return log_r_; }
  double radius() const { return r0_ * std::exp(log_r_); }

  void diffuse(double dt) {
    if (!(dt > 0.0)) return;
    log_r_ += spec_.c1 * dt;
    if (spec_.a11 > 0.0) log_r_ += std::sqrt(spec_.a11 * dt) * standard_normal(diffusion_);
  }

  void fire() {
    next_event_ += exponential(clock_, spec_.radial_jump_rate);
    log_r_ += spec_.radial_jump_law.sample(clock_);
  }

 private:
  const GeneratorSpec& spec_;
  double r0_;
  double log_r_ = 0.0;
  Rng& diffusion_;
  Rng& clock_;
  double next_event_;
};

/// rho_t = r0 * exp(L_t) on the grid k*h, as a one-dimensional path.
inline CadlagPath simulate_radial_levy(const GeneratorSpec& spec, double r0, double t_end, double h,
                                       Rng& rng) {
  spec.validate();
  if (!(r0 > 0.0)) throw std::invalid_argument("simulate_radial_levy: r0 must be positive");
  RadialDriver drv(spec, r0, rng, rng);
  PathBuilder out(1, Point{r0});
  const auto grid = time_grid(t_end, h);
  double now = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    while (drv.next_event_time() < grid[k]) {
      const double te = drv.next_event_time();
      drv.diffuse(te - now);
      now = te;
      const double left = drv.radius();
      drv.fire();
      out.push_jump(te, Point{left}, Point{drv.radius()});
    }
    drv.diffuse(grid[k] - now);
    now = grid[k];
    out.push(now, Point{drv.radius()});
  }
  return std::move(out).finish();
}

namespace detail {

// Simulates xbar = rho * xi. `policy` supplies the next grid time after the
// current state and decides when to stop; it also sees the running clock
// T = int |xbar|^{1/alpha}, accumulated with the same rule as
// compute_T_from_xbar so that both agree bitwise.
template <class Policy>
CadlagPath run_invariant(const GeneratorSpec& spec, const Point& x0, std::uint64_t seed,
                         Policy&& policy) {
  spec.validate();
  if (x0.size() != spec.dim) throw std::invalid_argument("x0 has wrong dimension");
  const double r0 = norm(x0);
  if (!(r0 > 0.0)) throw std::invalid_argument("x0 must be nonzero");

  Rng radial_diffusion = make_rng(seed, Stream::radial_diffusion);
  Rng radial_clock = make_rng(seed, Stream::radial_clock);
  Rng angular_diffusion = make_rng(seed, Stream::angular_diffusion);
  Rng angular_clock = make_rng(seed, Stream::angular_clock);
  Rng killing = make_rng(seed, Stream::killing);

  RadialDriver rad(spec, r0, radial_diffusion, radial_clock);
  AngularDriver ang(spec.angular, UnitVector::normalized(x0), angular_diffusion, angular_clock);
  const double kill_time = spec.gamma > 0.0 ? exponential(killing, spec.gamma) : kInfinity;
  const double inv_alpha = 1.0 / spec.alpha;

  PathBuilder out(spec.dim, x0);
  double now = 0.0;
  double clock = 0.0;  // T at the last stored time
  double lifetime = kInfinity;
  std::size_t steps = 0;

  auto current = [&] { return scaled(ang.state().value(), rad.radius()); };
  auto advance = [&](double to) {
    rad.diffuse(to - now);
    ang.diffuse(to - now);
    now = to;
  };
  auto in_range = [&] {
    const double r = rad.radius();
    return r >= kRadiusFloor && r <= kRadiusCeiling;
  };
  // Running T over the stored points, as inverse_transform computes it.
  auto store = [&](double t, Point x, const Point* left) {
    clock += std::pow(norm(out.last_state()), inv_alpha) * (t - out.last_time());
    if (left) {
      out.push_jump(t, *left, std::move(x));
    } else {
      out.push(t, std::move(x));
    }
  };

  for (;;) {
    if (++steps > 50'000'000) throw std::runtime_error("run_invariant: step budget exhausted");
    const double grid_next = policy.next_time(now, rad.radius());
    const double event = std::min(rad.next_event_time(), ang.next_event_time());
    if (kill_time <= std::min(grid_next, event)) {
      lifetime = kill_time;
      break;
    }
    if (event < grid_next) {
      const bool radial = rad.next_event_time() <= ang.next_event_time();
      advance(event);
      if (!in_range()) {
        lifetime = now;
        break;
      }
      Point left = current();
      bool moved = true;
      if (radial) {
        rad.fire();
      } else {
        moved = ang.fire();
      }
      if (!in_range()) {
        lifetime = now;
        break;
      }
      if (moved) {
        Point right = current();
        if (right != left) store(now, std::move(right), &left);
      }
      continue;
    }
    advance(grid_next);
    if (!in_range()) {
      lifetime = now;
      break;
    }
    store(now, current(), nullptr);
    if (policy.done(now, clock)) break;
  }
  return std::move(out).finish(lifetime);
}

struct FixedGrid {
  double t_end;
  double h;
  std::size_t k = 0;

  double next_time(double now, double) {
    // Grid points k*h; events in between do not shift the grid.
    while (static_cast<double>(k) * h <= now) ++k;
    return std::min(static_cast<double>(k) * h, t_end);
  }
  bool done(double now, double) const { return now >= t_end; }
};

// now + min(h rho^{-1/alpha}, max_step), and at least the next double: at
// radii where the step is below the resolution of xbar time, one ulp of
// xbar already spans more x-time than the step asks for.
inline double adaptive_step(double now, double rho, double h, double inv_alpha, double max_step) {
  return std::max(now + std::min(h * std::pow(rho, -inv_alpha), max_step), std::nextafter(now, kInfinity));
}

// Steps of length h*rho^{-1/alpha} in xbar time, i.e. about h in x time,
// capped at max_step. Stops once the x-time clock reaches t_end.
struct SelfSimilarGrid {
  double t_end;
  double h;
  double inv_alpha;
  double max_step;

  double next_time(double now, double rho) const { return adaptive_step(now, rho, h, inv_alpha, max_step); }
  bool done(double, double clock) const { return clock >= t_end; }
};

// Stops once xbar time reaches tbar_end.
struct InvariantHorizon {
  double tbar_end;
  double h;
  double inv_alpha;
  double max_step;

  double next_time(double now, double rho) const {
    return std::min(adaptive_step(now, rho, h, inv_alpha, max_step), tbar_end);
  }
  bool done(double now, double) const { return now >= tbar_end; }
};

inline constexpr double kMaxInvariantStep = 0.1;

}  // namespace detail

/// xbar_t = rho_t * xi_t on the grid k*h up to t_end, killed at an
/// independent Exp(gamma) time.
inline CadlagPath simulate_invariant(const GeneratorSpec& spec, const Point& x0, double t_end,
                                     double h, std::uint64_t seed) {
  if (!(t_end > 0.0) || !(h > 0.0))
    throw std::invalid_argument("simulate_invariant: t_end and h must be positive");
  return detail::run_invariant(spec, x0, seed, detail::FixedGrid{t_end, h});
}

/// The skew product x_t = r_t * xi_{A_t}: simulates xbar until its clock
/// T reaches t_end, then applies the inverse time change. Grid spacing in x
/// time is about h. The output horizon is >= t_end unless the path is killed.
inline CadlagPath build_self_similar(const GeneratorSpec& spec, const Point& x0, double t_end,
                                     double h, std::uint64_t seed) {
  if (!(t_end > 0.0) || !(h > 0.0))
    throw std::invalid_argument("build_self_similar: t_end and h must be positive");
  const double inv_alpha = 1.0 / spec.alpha;
  auto xbar = detail::run_invariant(
      spec, x0, seed,
      detail::SelfSimilarGrid{t_end, h, inv_alpha, std::max(h, detail::kMaxInvariantStep)});
  return inverse_transform(xbar, Alpha{spec.alpha});
}

/// Same construction, but run until the underlying xbar reaches time
/// tbar_end. forward_transform of the result is then observable on
/// [0, tbar_end].
inline CadlagPath build_self_similar_to_xbar_time(const GeneratorSpec& spec, const Point& x0,
                                                  double tbar_end, double h, std::uint64_t seed) {
  if (!(tbar_end > 0.0) || !(h > 0.0))
    throw std::invalid_argument("build_self_similar_to_xbar_time: horizon and h must be positive");
  const double inv_alpha = 1.0 / spec.alpha;
  auto xbar = detail::run_invariant(
      spec, x0, seed,
      detail::InvariantHorizon{tbar_end, h, inv_alpha, std::max(h, detail::kMaxInvariantStep)});
  return inverse_transform(xbar, Alpha{spec.alpha});
}

/// Uniform direction on S^{d-1}.
inline Point uniform_direction(std::size_t dim, Rng& rng) {
  Point g(dim);
  double n = 0.0;
  do {
    for (auto& c : g) c = standard_normal(rng);
    n = norm(g);
  } while (!(n > 0.0));
  for (auto& c : g) c /= n;
  return g;
}

namespace detail {

// Stable path on the grid k*h. With a finite clock_target the run also stops
// once the Lamperti clock A (index 1/beta, same quadrature as compute_A)
// reaches it, so forward_transform of the output is observable up to
// clock_target.
inline CadlagPath run_stable(const StableSpec& spec, double t_end, double h, std::uint64_t seed,
                             double clock_target) {
  spec.validate();
  if (!(h > 0.0)) throw std::invalid_argument("simulate_isotropic_stable: h must be positive");
  Rng diffusion = make_rng(seed, Stream::stable_diffusion);
  Rng clock_rng = make_rng(seed, Stream::stable_clock);
  const double rate = spec.large_jump_rate();
  const double sd_rate = std::sqrt(spec.small_jump_variance());
  const double clock_power = -1.0 / Alpha{1.0 / spec.beta}.value();
  const std::size_t d = spec.dim;

  Point x = spec.x0;
  PathBuilder out(d, x);
  double now = 0.0;
  double next_jump = exponential(clock_rng, rate);
  double clock = 0.0;
  std::size_t steps = 0;

  auto diffuse = [&](double to) {
    const double dt = to - now;
    if (dt > 0.0) {
      const double s = sd_rate * std::sqrt(dt);
      for (auto& c : x) c += s * standard_normal(diffusion);
    }
    now = to;
  };
  auto store = [&](const Point* left) {
    clock += std::pow(norm(out.last_state()), clock_power) * (now - out.last_time());
    if (left) {
      out.push_jump(now, *left, x);
    } else {
      out.push(now, x);
    }
  };

  for (std::size_t k = 1;; ++k) {
    if (++steps > 50'000'000) throw std::runtime_error("run_stable: step budget exhausted");
    const double grid = std::isfinite(t_end) ? std::min(static_cast<double>(k) * h, t_end)
                                             : static_cast<double>(k) * h;
    while (next_jump < grid) {
      diffuse(next_jump);
      if (norm(x) < kRadiusFloor) return std::move(out).finish(now);
      const double radius = spec.eps_trunc * std::pow(uniform_open(clock_rng), -1.0 / spec.beta);
      const Point dir = uniform_direction(d, clock_rng);
      const Point left = x;
      for (std::size_t i = 0; i < d; ++i) x[i] += radius * dir[i];
      next_jump += exponential(clock_rng, rate);
      if (norm(x) < kRadiusFloor) return std::move(out).finish(now);
      if (x != left) store(&left);
    }
    diffuse(grid);
    if (norm(x) < kRadiusFloor) return std::move(out).finish(now);
    store(nullptr);
    if (now >= t_end || clock >= clock_target) break;
  }
  return std::move(out).finish();
}

}  // namespace detail

/// Isotropic beta-stable path started at spec.x0 on the grid k*h up to
/// t_end. Killed if the state comes within kRadiusFloor of the origin.
inline CadlagPath simulate_isotropic_stable(const StableSpec& spec, double t_end, double h,
                                            std::uint64_t seed) {
  if (!(t_end > 0.0)) throw std::invalid_argument("simulate_isotropic_stable: t_end must be positive");
  return detail::run_stable(spec, t_end, h, seed, kInfinity);
}

/// Stable path run until its Lamperti clock (alpha = 1/beta) reaches
/// clock_target.
inline CadlagPath simulate_isotropic_stable_to_clock(const StableSpec& spec, double clock_target,
                                                     double h, std::uint64_t seed) {
  if (!(clock_target > 0.0))
    throw std::invalid_argument("simulate_isotropic_stable_to_clock: target must be positive");
  return detail::run_stable(spec, kInfinity, h, seed, clock_target);
}

}  // namespace isoss

#endif  // ISOSS_FACTORY_HPP_
