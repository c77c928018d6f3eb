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
/// \brief Monte Carlo checks of the defining invariances of a process family.
///
/// A family is given as a Sampler: a function that simulates one path from a
/// start point, up to at least a requested horizon, from a 64-bit seed. Each
/// check draws two samples of a scalar functional whose laws coincide under
/// the null and compares them with ks_two_sample. Killed paths contribute +inf.

#ifndef ISOSS_CHECKS_HPP_
#define ISOSS_CHECKS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "isoss/path.hpp"
#include "isoss/rng.hpp"
#include "isoss/stats.hpp"
#include "isoss/vec.hpp"

namespace isoss {

using Sampler = std::function<CadlagPath(const Point& x0, double t_end, std::uint64_t seed)>;

/// Threads used by the checks; 0 means hardware concurrency.
inline unsigned& check_threads() {
  static unsigned n = 0;
  return n;
}

/// Calls fn(i) for i in [0, n). Work is split into contiguous blocks, so
/// results written by index do not depend on the thread count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn, unsigned threads = check_threads()) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::vector<std::jthread> pool;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (unsigned w = 0; w < threads; ++w) {
    const std::size_t lo = n * w / threads;
    const std::size_t hi = n * (w + 1) / threads;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

/// A scalar functional of the state at a fixed time.
struct Functional {
  std::string name;
  std::function<double(const Point&)> eval;
};

inline Functional norm_functional() {
  return {"norm", [](const Point& x) { return norm(x); }};
}

inline Functional coordinate_functional(std::size_t k) {
  return {"coord" + std::to_string(k + 1), [k](const Point& x) { return x.at(k); }};
}

namespace detail {

// Value of each functional of map(x_t), one sample per path.
inline std::vector<std::vector<double>> sample_functionals(
    const Sampler& sampler, const Point& x0, double t, std::size_t n, std::uint64_t seed,
    const std::function<Point(const Point&)>& map, const std::vector<Functional>& fs) {
  std::vector<std::vector<double>> out(fs.size(), std::vector<double>(n));
  parallel_for(n, [&](std::size_t i) {
    const CadlagPath p = sampler(x0, t, path_seed(seed, i));
    const auto obs = p.observe(t);
    if (obs.status == CadlagPath::Status::beyond_horizon)
      throw std::runtime_error("sampler returned a path shorter than the requested horizon");
    if (obs.status == CadlagPath::Status::killed) {
      for (auto& col : out) col[i] = kInfinity;
      return;
    }
    const Point y = map(obs.value);
    for (std::size_t f = 0; f < fs.size(); ++f) out[f][i] = fs[f].eval(y);
  });
  return out;
}

inline std::vector<TestReport> compare(const std::string& name,
                                       const std::vector<std::vector<double>>& a,
                                       const std::vector<std::vector<double>>& b,
                                       const std::vector<Functional>& fs,
                                       const nlohmann::ordered_json& params) {
  std::vector<TestReport> reps;
  for (std::size_t f = 0; f < fs.size(); ++f) {
    auto rep = ks_two_sample(a[f], b[f]);
    rep.name = name;
    rep.params = params;
    rep.params["functional"] = fs[f].name;
    rep.params["bonferroni"] = fs.size();
    reps.push_back(std::move(rep));
  }
  return reps;
}

inline constexpr std::uint64_t kSecondSampleSalt = 0x5eedULL << 32;

}  // namespace detail

/// Scaling check: |x_{lambda t*}| from x0 against lambda^alpha |x_{t*}| from
/// lambda^{-alpha} x0, plus the same for the first coordinate. `alpha` is the
/// exponent under test; passing a wrong one gives a power check.
inline std::vector<TestReport> self_similarity_check(const Sampler& sampler, const Point& x0,
                                                     double alpha, double lambda, double t_star,
                                                     std::size_t n, std::uint64_t seed) {
  if (!(lambda > 0.0) || !(t_star > 0.0) || !(alpha > 0.0))
    throw std::invalid_argument("self_similarity_check: lambda, t_star, alpha must be positive");
  const std::vector<Functional> fs{norm_functional(), coordinate_functional(0)};
  const double scale = std::pow(lambda, alpha);
  auto a = detail::sample_functionals(sampler, x0, lambda * t_star, n, seed,
                                      [](const Point& x) { return x; }, fs);
  auto b = detail::sample_functionals(sampler, scaled(x0, 1.0 / scale), t_star, n,
                                      seed ^ detail::kSecondSampleSalt,
                                      [scale](const Point& x) { return scaled(x, scale); }, fs);
  nlohmann::ordered_json params{{"lambda", lambda}, {"t_star", t_star}, {"alpha", alpha}, {"seed", seed}};
  return detail::compare("self_similarity", a, b, fs, params);
}

/// Isotropy check: probe functionals of phi(x_{t*}) from x0 against x_{t*}
/// from phi(x0). Probes are the first and last coordinates.
inline std::vector<TestReport> isotropy_check(const Sampler& sampler, const Point& x0,
                                              const Rotation& phi, double t_star, std::size_t n,
                                              std::uint64_t seed) {
  if (!(t_star > 0.0)) throw std::invalid_argument("isotropy_check: t_star must be positive");
  const std::vector<Functional> fs{coordinate_functional(0), coordinate_functional(x0.size() - 1)};
  auto a = detail::sample_functionals(sampler, x0, t_star, n, seed,
                                      [&phi](const Point& x) { return phi.apply(x); }, fs);
  auto b = detail::sample_functionals(sampler, phi.apply(x0), t_star, n,
                                      seed ^ detail::kSecondSampleSalt,
                                      [](const Point& x) { return x; }, fs);
  nlohmann::ordered_json rot = nlohmann::ordered_json::array();
  for (const auto& g : phi.factors()) rot.push_back({{"i", g.i}, {"j", g.j}, {"angle", g.angle}});
  nlohmann::ordered_json params{{"t_star", t_star}, {"rotation", rot}, {"seed", seed}};
  return detail::compare("isotropy", a, b, fs, params);
}

/// Dilation check: lambda * xbar_{t*} from x0 against xbar_{t*} from
/// lambda * x0, on the norm and the first coordinate.
inline std::vector<TestReport> multiplicative_invariance_check(const Sampler& sampler,
                                                               const Point& x0, double lambda,
                                                               double t_star, std::size_t n,
                                                               std::uint64_t seed) {
  if (!(lambda > 0.0) || !(t_star > 0.0))
    throw std::invalid_argument("multiplicative_invariance_check: lambda, t_star must be positive");
  const std::vector<Functional> fs{norm_functional(), coordinate_functional(0)};
  auto a = detail::sample_functionals(sampler, x0, t_star, n, seed,
                                      [lambda](const Point& x) { return scaled(x, lambda); }, fs);
  auto b = detail::sample_functionals(sampler, scaled(x0, lambda), t_star, n,
                                      seed ^ detail::kSecondSampleSalt,
                                      [](const Point& x) { return x; }, fs);
  nlohmann::ordered_json params{{"lambda", lambda}, {"t_star", t_star}, {"seed", seed}};
  return detail::compare("multiplicative_invariance", a, b, fs, params);
}

/// Smallest p-value of a Bonferroni group, compared against level / size.
inline bool passes_bonferroni(const std::vector<TestReport>& group, double level = 0.01) {
  for (const auto& r : group) {
    if (!(r.p_value > level / static_cast<double>(group.size()))) return false;
  }
  return true;
}

/// (log |xbar_{t*}|, geodesic distance of xbar_{t*}/|xbar_{t*}| from the
/// starting direction); nullopt if the path is killed by t*.
inline std::optional<std::pair<double, double>> radial_angular_functionals(const CadlagPath& xbar,
                                                                           double t_star) {
  const auto obs = xbar.observe(t_star);
  if (obs.status == CadlagPath::Status::beyond_horizon)
    throw std::runtime_error("radial_angular_functionals: path shorter than t_star");
  if (obs.status == CadlagPath::Status::killed) return std::nullopt;
  const Point& x0 = xbar.states().front();
  const double r = norm(obs.value);
  return std::pair{std::log(r), geodesic_angle(scaled(x0, 1.0 / norm(x0)), scaled(obs.value, 1.0 / r))};
}

struct JumpFraction {
  std::size_t joint = 0;
  std::size_t total = 0;

  /// joint / total, 0 when there are no jumps.
  double fraction() const {
    return total == 0 ? 0.0 : static_cast<double>(joint) / static_cast<double>(total);
  }

  JumpFraction& operator+=(const JumpFraction& o) {
    joint += o.joint;
    total += o.total;
    return *this;
  }
};

inline JumpFraction simultaneous_jump_fraction(const CadlagPath& path, double tol_r = kDefaultJumpTol,
                                               double tol_theta = kDefaultJumpTol) {
  JumpFraction jf;
  for (const auto& j : path.jumps()) {
    ++jf.total;
    if (classify_jump(j, tol_r, tol_theta) == JumpClass::joint) ++jf.joint;
  }
  return jf;
}

}  // namespace isoss

#endif  // ISOSS_CHECKS_HPP_
