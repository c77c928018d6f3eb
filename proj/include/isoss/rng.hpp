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
/// \brief Seed splitting and per-stream random engines.
///
/// Every simulated path owns a 64-bit path seed. Independent drivers of one
/// path (radial diffusion, angular diffusion, jump clocks, killing clock)
/// draw from separate engines whose seeds are derived from the path seed and
/// a fixed stream index:
///
///     path_seed   = mix(mix(master ^ mix(path_index + 1)))
///     stream_seed = mix(path_seed ^ (stream_index * 0x9E3779B97F4A7C15))
///
/// where mix is the SplitMix64 finalizer. The derivation is a pure function,
/// so results do not depend on the order in which paths are generated.

#ifndef ISOSS_RNG_HPP_
#define ISOSS_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace isoss {

using Rng = std::mt19937_64;

/// SplitMix64 output function.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Fixed stream indices. Changing any value changes every simulated output.
enum class Stream : std::uint64_t {
  radial_diffusion = 1,
  radial_clock = 2,
  angular_diffusion = 3,
  angular_clock = 4,
  killing = 5,
  stable_diffusion = 6,
  stable_clock = 7,
};

constexpr std::uint64_t path_seed(std::uint64_t master,
                                  std::uint64_t path_index) noexcept {
  return splitmix64(splitmix64(master ^ splitmix64(path_index + 1)));
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, Stream s) noexcept {
  return splitmix64(seed ^ (static_cast<std::uint64_t>(s) * 0x9E3779B97F4A7C15ULL));
}

inline Rng make_rng(std::uint64_t seed, Stream s) { return Rng{stream_seed(seed, s)}; }

/// Uniform on the open interval (0, 1).
inline double uniform_open(Rng& rng) {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double standard_normal(Rng& rng) {
  // Box-Muller without caching, so each call consumes exactly two draws.
  const double u1 = uniform_open(rng);
  const double u2 = uniform_open(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double exponential(Rng& rng, double rate) { return -std::log(uniform_open(rng)) / rate; }

}  // namespace isoss

#endif  // ISOSS_RNG_HPP_
