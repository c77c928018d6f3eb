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
/// \brief The Lamperti time change between an alpha-self-similar process x
/// and its multiplicatively invariant counterpart xbar.
///
///     A_t = int_0^t |x_s|^{-1/alpha} ds        (clock of x)
///     T_t = inf{s >= 0 : A_s >= t}              (inverse clock)
///     T_t = int_0^t |xbar_u|^{+1/alpha} du      (same clock, read off xbar)
///
/// with xbar_t = x_{T_t} and x_t = xbar_{A_t}. Integrals use the right-limit
/// piecewise-constant rule on the stored grid, which is exact for
/// piecewise-constant moduli.

#ifndef ISOSS_LAMPERTI_HPP_
#define ISOSS_LAMPERTI_HPP_

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "isoss/path.hpp"

namespace isoss {

class Alpha {
 public:
  explicit Alpha(double value) : value_(value) {
    if (!(value > 0.0) || !std::isfinite(value))
      throw std::invalid_argument("Alpha: alpha must be a positive finite number");
  }
  double value() const { return value_; }

 private:
  double value_;
};

/// Continuous strictly increasing piecewise-linear map through (0, 0).
class TimeChange {
 public:
  struct Knot {
    double t;
    double value;
    friend bool operator==(const Knot&, const Knot&) = default;
  };

  explicit TimeChange(std::vector<Knot> knots) : knots_(std::move(knots)) {
    if (knots_.empty() || knots_.front().t != 0.0 || knots_.front().value != 0.0)
      throw std::invalid_argument("TimeChange: must start at (0, 0)");
    for (std::size_t i = 1; i < knots_.size(); ++i) {
      if (!(knots_[i].t > knots_[i - 1].t) || !(knots_[i].value > knots_[i - 1].value))
        throw std::invalid_argument("TimeChange: knots not strictly increasing");
    }
  }

  const std::vector<Knot>& knots() const { return knots_; }
  double domain_end() const { return knots_.back().t; }
  double range_end() const { return knots_.back().value; }

  /// Map value at t; exact at knots. Requires 0 <= t <= domain_end().
  double at(double t) const {
    return interpolate(t, &Knot::t, &Knot::value);
  }

  /// Preimage of v; exact at knot values. Requires 0 <= v <= range_end().
  double inverse_at(double v) const {
    return interpolate(v, &Knot::value, &Knot::t);
  }

  friend bool operator==(const TimeChange&, const TimeChange&) = default;

 private:
  double interpolate(double x, double Knot::*from, double Knot::*to) const {
    auto it = std::lower_bound(knots_.begin(), knots_.end(), x,
                               [from](const Knot& k, double v) { return k.*from < v; });
    if (it == knots_.end()) throw std::out_of_range("TimeChange: argument beyond last knot");
    if ((*it).*from == x) return (*it).*to;
    if (it == knots_.begin()) throw std::out_of_range("TimeChange: negative argument");
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double w = (x - lo.*from) / (hi.*from - lo.*from);
    return lo.*to + w * (hi.*to - lo.*to);
  }

  std::vector<Knot> knots_;
};

inline TimeChange invert(const TimeChange& tc) {
  std::vector<TimeChange::Knot> swapped;
  swapped.reserve(tc.knots().size());
  for (const auto& k : tc.knots()) swapped.push_back({k.value, k.t});
  return TimeChange(std::move(swapped));
}

namespace detail {

// int_0^t |x_s|^p ds at every stored time, plus a final value at the
// lifetime when the path is killed (the last state is held until then).
inline std::vector<double> running_modulus_integral(const CadlagPath& path, double p) {
  if (path.empty()) throw std::invalid_argument("time change of an empty path");
  const auto& ts = path.times();
  const auto& xs = path.states();
  std::vector<double> acc;
  acc.reserve(ts.size() + 1);
  acc.push_back(0.0);
  for (std::size_t i = 1; i < ts.size(); ++i) {
    acc.push_back(acc.back() + std::pow(norm(xs[i - 1]), p) * (ts[i] - ts[i - 1]));
  }
  if (path.killed()) acc.push_back(acc.back() + std::pow(norm(xs.back()), p) * (path.lifetime() - ts.back()));
  return acc;
}

inline TimeChange integrate_modulus_power(const CadlagPath& path, double p) {
  const auto acc = running_modulus_integral(path, p);
  const auto& ts = path.times();
  std::vector<TimeChange::Knot> knots;
  knots.reserve(acc.size());
  for (std::size_t i = 0; i < ts.size(); ++i) knots.push_back({ts[i], acc[i]});
  if (path.killed()) knots.push_back({path.lifetime(), acc.back()});
  return TimeChange(std::move(knots));
}

}  // namespace detail

inline TimeChange compute_A(const CadlagPath& path, Alpha alpha) {
  return detail::integrate_modulus_power(path, -1.0 / alpha.value());
}

inline TimeChange compute_T_from_xbar(const CadlagPath& xbar, Alpha alpha) {
  return detail::integrate_modulus_power(xbar, 1.0 / alpha.value());
}

/// Reparameterize: the output at time u is the input at time tc(u).
///
/// Output times are the preimages of the input times that tc reaches, so
/// every stored state and jump carries over unchanged. The lifetime maps
/// through the inverse of tc when tc reaches it; otherwise the output is a
/// surviving path truncated at tc's horizon.
inline CadlagPath apply_time_change(const CadlagPath& path, const TimeChange& tc) {
  const double limit = path.killed() ? path.lifetime() : path.final_time();
  if (tc.range_end() > limit)
    throw std::out_of_range("apply_time_change: time change runs past the input lifetime");
  const double horizon = tc.range_end();

  const auto& ts = path.times();
  std::vector<double> times;
  std::vector<Point> states;
  times.reserve(ts.size());
  states.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size() && ts[i] <= horizon; ++i) {
    times.push_back(tc.inverse_at(ts[i]));
    states.push_back(path.states()[i]);
  }
  std::vector<JumpRecord> jumps;
  for (const auto& j : path.jumps()) {
    if (j.time <= horizon) jumps.push_back({tc.inverse_at(j.time), j.left, j.right});
  }
  const double lifetime =
      (path.killed() && path.lifetime() <= horizon) ? tc.inverse_at(path.lifetime()) : kInfinity;
  return CadlagPath(path.dim(), std::move(times), std::move(states), std::move(jumps), lifetime);
}

/// xbar_t = x_{T_t}, defined up to A at the final stored time (or the
/// lifetime, for killed paths).
inline CadlagPath forward_transform(const CadlagPath& path, Alpha alpha) {
  return apply_time_change(path, invert(compute_A(path, alpha)));
}

/// x_t = xbar_{A_t} with A the inverse of T read off xbar.
///
/// Stretches of xbar whose T increment vanishes in floating point (radii so
/// small that |xbar|^{1/alpha} dt is below the resolution of T) occupy no
/// x-time. They collapse onto one x-time holding the latest state; jump
/// records inside a collapsed stretch are dropped, since they no longer
/// describe the path there.
inline CadlagPath inverse_transform(const CadlagPath& xbar, Alpha alpha) {
  const auto acc = detail::running_modulus_integral(xbar, 1.0 / alpha.value());
  const auto& ts = xbar.times();
  const auto& xs = xbar.states();
  const auto& js = xbar.jumps();
  std::vector<double> times{0.0};
  std::vector<Point> states{xs.front()};
  std::vector<JumpRecord> jumps;
  auto drop_jump_at_back = [&] {
    if (!jumps.empty() && jumps.back().time == times.back()) jumps.pop_back();
  };
  std::size_t j = 0;
  for (std::size_t i = 1; i < ts.size(); ++i) {
    const JumpRecord* rec = nullptr;
    while (j < js.size() && js[j].time < ts[i]) ++j;
    if (j < js.size() && js[j].time == ts[i]) rec = &js[j];
    if (acc[i] > times.back()) {
      times.push_back(acc[i]);
      states.push_back(xs[i]);
      if (rec) jumps.push_back({acc[i], rec->left, rec->right});
    } else if (times.size() > 1) {
      drop_jump_at_back();
      states.back() = xs[i];
    }
  }
  double lifetime = kInfinity;
  if (xbar.killed()) {
    lifetime = acc.back();
    while (times.size() > 1 && !(lifetime > times.back())) {
      drop_jump_at_back();
      times.pop_back();
      states.pop_back();
    }
  }
  return CadlagPath(xbar.dim(), std::move(times), std::move(states), std::move(jumps), lifetime);
}

}  // namespace isoss

#endif  // ISOSS_LAMPERTI_HPP_
