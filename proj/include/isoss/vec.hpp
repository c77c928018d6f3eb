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
/// \brief Small dense-vector helpers and orthogonal maps built from Givens
/// rotations.

#ifndef ISOSS_VEC_HPP_
#define ISOSS_VEC_HPP_

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace isoss {

using Point = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Point scaled(std::span<const double> a, double c) {
  Point out(a.begin(), a.end());
  for (auto& v : out) v *= c;
  return out;
}

inline Point add(std::span<const double> a, std::span<const double> b) {
  Point out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

inline Point subtract(std::span<const double> a, std::span<const double> b) {
  Point out(a.begin(), a.end());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

/// Angle between two unit vectors, 2*atan2(|u-v|, |u+v|). Accurate near 0
/// and near pi, unlike acos of the dot product.
inline double geodesic_angle(std::span<const double> u, std::span<const double> v) {
  double dm = 0.0;
  double dp = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dm += (u[i] - v[i]) * (u[i] - v[i]);
    dp += (u[i] + v[i]) * (u[i] + v[i]);
  }
  return 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
}

/// The point (0, ..., 0, 1).
inline Point north_pole(std::size_t dim) {
  Point o(dim, 0.0);
  o.back() = 1.0;
  return o;
}

struct Givens {
  std::size_t i = 0;
  std::size_t j = 1;
  double angle = 0.0;

  friend bool operator==(const Givens&, const Givens&) = default;
};

/// Product of plane rotations, applied in list order.
class Rotation {
 public:
  Rotation() = default;
  explicit Rotation(std::vector<Givens> factors) : factors_(std::move(factors)) {
    for (const auto& g : factors_) {
      if (g.i == g.j) throw std::invalid_argument("Rotation: Givens plane needs two axes");
    }
  }

  const std::vector<Givens>& factors() const { return factors_; }

  Point apply(std::span<const double> x) const {
    Point y(x.begin(), x.end());
    for (const auto& g : factors_) {
      if (g.i >= y.size() || g.j >= y.size())
        throw std::invalid_argument("Rotation: axis out of range");
      const double c = std::cos(g.angle);
      const double s = std::sin(g.angle);
      const double a = y[g.i];
      const double b = y[g.j];
      y[g.i] = c * a - s * b;
      y[g.j] = s * a + c * b;
    }
    return y;
  }

 private:
  std::vector<Givens> factors_;
};

}  // namespace isoss

#endif  // ISOSS_VEC_HPP_
