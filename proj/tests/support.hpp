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

// Test-only helpers: random geometry and independent Monte Carlo oracles.

#ifndef ISOSS_TESTS_SUPPORT_HPP_
#define ISOSS_TESTS_SUPPORT_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "isoss/factory.hpp"
#include "isoss/generator.hpp"
#include "isoss/rng.hpp"
#include "isoss/vec.hpp"

namespace isoss::testing_support {

inline Point random_point(std::size_t d, Rng& rng) {
  Point p(d);
  for (auto& c : p) c = standard_normal(rng);
  return p;
}

/// Product of Givens rotations over every coordinate plane, random angles.
inline Rotation random_rotation(std::size_t d, Rng& rng) {
  std::vector<Givens> gs;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) gs.push_back({i, j, 2.0 * std::numbers::pi * uniform_open(rng)});
  }
  return Rotation(std::move(gs));
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

struct MonteCarloEstimate {
  double value;
  double std_error;
};

/// Finite-difference semigroup oracle: (E f(xbar_h) - f(x)) / h for every
/// test function, from n paths of simulate_invariant. Killed paths count as
/// f = 0.
inline std::vector<MonteCarloEstimate> semigroup_difference(const GeneratorSpec& spec,
                                                            const std::vector<TestFunction>& fs,
                                                            const Point& x, double h, std::size_t n,
                                                            std::uint64_t seed) {
  std::vector<double> sum(fs.size(), 0.0), sum2(fs.size(), 0.0), base(fs.size());
  for (std::size_t k = 0; k < fs.size(); ++k) base[k] = fs[k](x);
  for (std::size_t i = 0; i < n; ++i) {
    const auto p = simulate_invariant(spec, x, h, h, path_seed(seed, i));
    const auto obs = p.observe(h);
    for (std::size_t k = 0; k < fs.size(); ++k) {
      const double v = (obs.status == CadlagPath::Status::alive ? fs[k](obs.value) : 0.0) - base[k];
      sum[k] += v;
      sum2[k] += v * v;
    }
  }
  std::vector<MonteCarloEstimate> out;
  const double nn = static_cast<double>(n);
  for (std::size_t k = 0; k < fs.size(); ++k) {
    const double m = sum[k] / nn;
    const double var = sum2[k] / nn - m * m;
    out.push_back({m / h, std::sqrt(var / nn) / h});
  }
  return out;
}

}  // namespace isoss::testing_support

#endif  // ISOSS_TESTS_SUPPORT_HPP_
