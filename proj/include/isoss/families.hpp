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
/// \brief Samplers for each process family, in original time (x) and in
/// Lamperti time (xbar).

#ifndef ISOSS_FAMILIES_HPP_
#define ISOSS_FAMILIES_HPP_

#include <cstdint>
#include <stdexcept>
#include <variant>

#include "isoss/checks.hpp"
#include "isoss/factory.hpp"
#include "isoss/lamperti.hpp"

namespace isoss {

enum class Kind { skew_product, invariant, stable };

inline const char* to_string(Kind k) {
  switch (k) {
    case Kind::skew_product: return "skew_product";
    case Kind::invariant: return "invariant";
    case Kind::stable: return "stable";
  }
  return "?";
}

using FamilySpec = std::variant<GeneratorSpec, StableSpec>;

/// Self-similarity index of the family: spec.alpha, or 1/beta for stable.
inline double family_alpha(const FamilySpec& spec) {
  if (const auto* g = std::get_if<GeneratorSpec>(&spec)) return g->alpha;
  return 1.0 / std::get<StableSpec>(spec).beta;
}

/// The process itself: x for skew_product and stable, xbar for invariant.
inline Sampler original_time_sampler(Kind kind, const FamilySpec& spec, double h) {
  switch (kind) {
    case Kind::skew_product: {
      const auto g = std::get<GeneratorSpec>(spec);
      return [g, h](const Point& x0, double t, std::uint64_t seed) {
        return build_self_similar(g, x0, t, h, seed);
      };
    }
    case Kind::invariant: {
      const auto g = std::get<GeneratorSpec>(spec);
      return [g, h](const Point& x0, double t, std::uint64_t seed) {
        return simulate_invariant(g, x0, t, h, seed);
      };
    }
    case Kind::stable: {
      const auto s = std::get<StableSpec>(spec);
      return [s, h](const Point& x0, double t, std::uint64_t seed) {
        StableSpec local = s;
        local.x0 = x0;
        return simulate_isotropic_stable(local, t, h, seed);
      };
    }
  }
  throw std::logic_error("original_time_sampler: unknown kind");
}

/// The Lamperti-time process xbar. For skew_product and stable paths this
/// is forward_transform of a path simulated long enough for xbar to reach
/// the requested horizon.
inline Sampler lamperti_time_sampler(Kind kind, const FamilySpec& spec, double h) {
  switch (kind) {
    case Kind::skew_product: {
      const auto g = std::get<GeneratorSpec>(spec);
      return [g, h](const Point& x0, double t, std::uint64_t seed) {
        // Round-off in the two quadratures can shave an ulp off the horizon.
        const auto x = build_self_similar_to_xbar_time(g, x0, t * (1.0 + 1e-9) + h, h, seed);
        return forward_transform(x, Alpha{g.alpha});
      };
    }
    case Kind::invariant: return original_time_sampler(kind, spec, h);
    case Kind::stable: {
      const auto s = std::get<StableSpec>(spec);
      return [s, h](const Point& x0, double t, std::uint64_t seed) {
        StableSpec local = s;
        local.x0 = x0;
        const auto x = simulate_isotropic_stable_to_clock(local, t, h, seed);
        return forward_transform(x, Alpha{1.0 / s.beta});
      };
    }
  }
  throw std::logic_error("lamperti_time_sampler: unknown kind");
}

}  // namespace isoss

#endif  // ISOSS_FAMILIES_HPP_
