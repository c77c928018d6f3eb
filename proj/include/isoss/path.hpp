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
/// \brief Sampled cadlag paths in R^d minus the origin, their polar
/// decomposition and jump bookkeeping.

#ifndef ISOSS_PATH_HPP_
#define ISOSS_PATH_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "isoss/vec.hpp"

namespace isoss {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct JumpRecord {
  double time = 0.0;
  Point left;   // x_{t-}
  Point right;  // x_t

  friend bool operator==(const JumpRecord&, const JumpRecord&) = default;
};

/// A cadlag trajectory stored at grid and event times.
///
/// states[i] is the right limit at times[i]. Between stored times the path is
/// not interpolated; callers that need a value at an arbitrary time use
/// observe(), which holds the last stored state. A finite lifetime marks the
/// kill time; every stored time lies strictly before it.
class CadlagPath {
 public:
  CadlagPath() = default;

  CadlagPath(std::size_t dim, std::vector<double> times, std::vector<Point> states,
             std::vector<JumpRecord> jumps = {}, double lifetime = kInfinity)
      : dim_(dim),
        times_(std::move(times)),
        states_(std::move(states)),
        jumps_(std::move(jumps)),
        lifetime_(lifetime) {
    validate();
  }

  std::size_t dim() const { return dim_; }
  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  const std::vector<double>& times() const { return times_; }
  const std::vector<Point>& states() const { return states_; }
  const std::vector<JumpRecord>& jumps() const { return jumps_; }
  double lifetime() const { return lifetime_; }
  bool killed() const { return std::isfinite(lifetime_); }
  double final_time() const { return times_.back(); }

  /// Index of the last stored time <= t; times must be nonempty and t >= 0.
  std::size_t index_at(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return static_cast<std::size_t>(std::distance(times_.begin(), it)) - 1;
  }

  enum class Status { alive, killed, beyond_horizon };

  struct Observation {
    Status status;
    Point value;  // empty unless alive
  };

  /// Value at time t under the hold convention. A killed path is observable
  /// up to its lifetime; a surviving path only up to its final stored time.
  Observation observe(double t) const {
    if (t >= lifetime_) return {Status::killed, {}};
    if (!killed() && t > times_.back()) return {Status::beyond_horizon, {}};
    return {Status::alive, states_[index_at(t)]};
  }

 private:
  void validate() const {
    if (dim_ < 1) throw std::invalid_argument("CadlagPath: dimension must be positive");
    if (times_.empty()) throw std::invalid_argument("CadlagPath: empty path");
    if (times_.size() != states_.size())
      throw std::invalid_argument("CadlagPath: times and states differ in length");
    if (times_.front() != 0.0) throw std::invalid_argument("CadlagPath: times[0] must be 0");
    for (std::size_t i = 1; i < times_.size(); ++i) {
      if (!(times_[i] > times_[i - 1]))
        throw std::invalid_argument("CadlagPath: times not strictly increasing at index " +
                                    std::to_string(i));
    }
    if (!(lifetime_ > times_.back()))
      throw std::invalid_argument("CadlagPath: stored time at or after lifetime");
    for (const auto& s : states_) {
      if (s.size() != dim_) throw std::invalid_argument("CadlagPath: state of wrong dimension");
      if (!(norm(s) > 0.0)) throw std::domain_error("CadlagPath: state outside E (zero norm)");
    }
    for (const auto& j : jumps_) {
      if (j.left.size() != dim_ || j.right.size() != dim_)
        throw std::invalid_argument("CadlagPath: jump of wrong dimension");
      if (j.left == j.right) throw std::invalid_argument("CadlagPath: jump without displacement");
      if (!(norm(j.left) > 0.0) || !(norm(j.right) > 0.0))
        throw std::domain_error("CadlagPath: jump endpoint outside E");
      auto it = std::lower_bound(times_.begin(), times_.end(), j.time);
      if (it == times_.end() || *it != j.time)
        throw std::invalid_argument("CadlagPath: jump time not among stored times");
      if (states_[static_cast<std::size_t>(it - times_.begin())] != j.right)
        throw std::invalid_argument("CadlagPath: jump right value differs from stored state");
    }
  }

  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<Point> states_;
  std::vector<JumpRecord> jumps_;
  double lifetime_ = kInfinity;
};

struct PolarView {
  std::vector<double> times;
  std::vector<double> r;
  std::vector<Point> theta;
};

inline PolarView polar_decompose(const CadlagPath& path) {
  PolarView view;
  view.times = path.times();
  view.r.reserve(path.size());
  view.theta.reserve(path.size());
  for (const auto& x : path.states()) {
    const double r = norm(x);
    if (!(r > 0.0)) throw std::domain_error("polar_decompose: path left E");
    view.r.push_back(r);
    view.theta.push_back(scaled(x, 1.0 / r));
  }
  return view;
}

enum class JumpClass { radial_only, angular_only, joint, negligible };

inline const char* to_string(JumpClass c) {
  switch (c) {
    case JumpClass::radial_only: return "radial";
    case JumpClass::angular_only: return "angular";
    case JumpClass::joint: return "joint";
    case JumpClass::negligible: return "negligible";
  }
  return "?";
}

inline constexpr double kDefaultJumpTol = 1e-9;

inline JumpClass classify_jump(const JumpRecord& j, double tol_r = kDefaultJumpTol,
                               double tol_theta = kDefaultJumpTol) {
  if (!(tol_r > 0.0) || !(tol_theta > 0.0))
    throw std::invalid_argument("classify_jump: tolerances must be positive");
  const double nl = norm(j.left);
  const double nr = norm(j.right);
  const bool radial = std::abs(nr - nl) > tol_r;
  const bool angular = geodesic_angle(scaled(j.left, 1.0 / nl), scaled(j.right, 1.0 / nr)) > tol_theta;
  if (radial && angular) return JumpClass::joint;
  if (radial) return JumpClass::radial_only;
  if (angular) return JumpClass::angular_only;
  return JumpClass::negligible;
}

/// Incremental construction for simulators. Records are validated once, on
/// finish().
class PathBuilder {
 public:
  PathBuilder(std::size_t dim, Point x0) : dim_(dim) {
    times_.push_back(0.0);
    states_.push_back(std::move(x0));
  }

  void push(double t, Point x) {
    times_.push_back(t);
    states_.push_back(std::move(x));
  }

  void push_jump(double t, Point left, Point right) {
    jumps_.push_back({t, std::move(left), right});
    push(t, std::move(right));
  }

  /// Drops the most recent point (and its jump record, if any). The
  /// initial point stays.
  void pop() {
    if (times_.size() < 2) throw std::logic_error("PathBuilder::pop: nothing to remove");
    if (!jumps_.empty() && jumps_.back().time == times_.back()) jumps_.pop_back();
    times_.pop_back();
    states_.pop_back();
  }

  std::size_t size() const { return times_.size(); }
  const Point& last_state() const { return states_.back(); }
  double last_time() const { return times_.back(); }

  CadlagPath finish(double lifetime = kInfinity) && {
    return CadlagPath(dim_, std::move(times_), std::move(states_), std::move(jumps_), lifetime);
  }

 private:
  std::size_t dim_;
  std::vector<double> times_;
  std::vector<Point> states_;
  std::vector<JumpRecord> jumps_;
};

}  // namespace isoss

#endif  // ISOSS_PATH_HPP_
