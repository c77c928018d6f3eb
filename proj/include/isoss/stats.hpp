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
/// \brief Rank and distribution-free test statistics: two-sample and
/// one-sample Kolmogorov-Smirnov, chi-square uniformity, Spearman
/// permutation test.

#ifndef ISOSS_STATS_HPP_
#define ISOSS_STATS_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <nlohmann/json.hpp>

#include "isoss/rng.hpp"

namespace isoss {

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
};

/// Survival function of the Kolmogorov distribution, P(K > x).
inline double kolmogorov_sf(double x) {
  if (!(x > 0.0)) return 1.0;
  if (x < 1.0) {
    // P(K <= x) = sqrt(2 pi)/x * sum_k exp(-(2k-1)^2 pi^2 / (8 x^2)), converges fast for small x.
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double cdf = 0.0;
    for (int k = 1; k <= 20; ++k) {
      const double m = 2.0 * k - 1.0;
      cdf += std::exp(-m * m * pi2 / (8.0 * x * x));
    }
    cdf *= std::sqrt(2.0 * std::numbers::pi) / x;
    return std::clamp(1.0 - cdf, 0.0, 1.0);
  }
  double sf = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sf += (k % 2 == 1 ? 2.0 : -2.0) * term;
    if (term < 1e-18) break;
  }
  return std::clamp(sf, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov with the asymptotic p-value at effective
/// size n1*n2/(n1+n2). Ties are handled by stepping both CDFs together.
inline TestReport ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }
  // Once either sample is exhausted, the gap only shrinks.
  const double ne = n1 * n2 / (n1 + n2);
  TestReport rep;
  rep.name = "ks_two_sample";
  rep.statistic = d;
  rep.p_value = kolmogorov_sf(std::sqrt(ne) * d);
  rep.n1 = x.size();
  rep.n2 = y.size();
  return rep;
}

/// One-sample KS against a continuous CDF; Stephens' finite-n correction.
inline TestReport ks_one_sample(std::span<const double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::vector<double> x(a.begin(), a.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  TestReport rep;
  rep.name = "ks_one_sample";
  rep.statistic = d;
  rep.p_value = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
  rep.n1 = x.size();
  rep.n2 = x.size();
  return rep;
}

inline TestReport ks_uniform(std::span<const double> a, double lo = 0.0, double hi = 1.0) {
  auto rep = ks_one_sample(a, [lo, hi](double v) { return std::clamp((v - lo) / (hi - lo), 0.0, 1.0); });
  rep.name = "ks_uniform";
  return rep;
}

/// Pearson chi-square test of equal cell probabilities over `bins` cells.
inline TestReport chi_square_uniform(std::span<const std::size_t> counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi_square_uniform: need at least two cells");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  if (!(total > 0.0)) throw std::invalid_argument("chi_square_uniform: no observations");
  const double expected = total / static_cast<double>(counts.size());
  double chi2 = 0.0;
  for (auto c : counts) {
    const double diff = static_cast<double>(c) - expected;
    chi2 += diff * diff / expected;
  }
  TestReport rep;
  rep.name = "chi_square_uniform";
  rep.statistic = chi2;
  rep.p_value = boost::math::gamma_q(0.5 * static_cast<double>(counts.size() - 1), 0.5 * chi2);
  rep.n1 = static_cast<std::size_t>(total);
  rep.n2 = counts.size();
  return rep;
}

/// Ranks 1..n with ties averaged.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace detail {

inline double pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

}  // namespace detail

inline double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("spearman: length mismatch");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return detail::pearson(ra, rb);
}

inline constexpr std::size_t kDefaultPermutations = 999;

/// Permutation test of zero Spearman correlation. The statistic is |rho|;
/// p = (1 + #{permuted |rho| >= observed}) / (1 + num_perm).
inline TestReport independence_check(std::span<const std::pair<double, double>> pairs,
                                     std::size_t num_perm, Rng& rng) {
  if (pairs.size() < 3) throw std::invalid_argument("independence_check: need at least 3 pairs");
  if (num_perm < 200) throw std::invalid_argument("independence_check: num_perm must be >= 200");
  std::vector<double> a, b;
  a.reserve(pairs.size());
  b.reserve(pairs.size());
  for (const auto& [x, y] : pairs) {
    a.push_back(x);
    b.push_back(y);
  }
  auto ra = average_ranks(a);
  auto rb = average_ranks(b);
  const std::size_t n = ra.size();
  const double mean = 0.5 * static_cast<double>(n + 1);
  double saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ra[i] -= mean;
    rb[i] -= mean;
    saa += ra[i] * ra[i];
    sbb += rb[i] * rb[i];
  }
  const double denom = std::sqrt(saa * sbb);
  auto stat = [&](const std::vector<double>& perm_b) {
    if (denom == 0.0) return 0.0;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += ra[i] * perm_b[i];
    return std::abs(s / denom);
  };
  const double observed = stat(rb);
  // Relative slack so that permutations reproducing the observed value
  // count as ties despite summation-order rounding.
  const double threshold = observed - 1e-12;
  std::size_t at_least = 0;
  for (std::size_t p = 0; p < num_perm; ++p) {
    for (std::size_t i = n - 1; i > 0; --i) {
      const auto k = static_cast<std::size_t>(uniform_open(rng) * static_cast<double>(i + 1));
      std::swap(rb[i], rb[std::min(k, i)]);
    }
    if (stat(rb) >= threshold) ++at_least;
  }
  TestReport rep;
  rep.name = "independence";
  rep.statistic = observed;
  rep.p_value = static_cast<double>(1 + at_least) / static_cast<double>(1 + num_perm);
  rep.n1 = n;
  rep.n2 = n;
  rep.params["num_perm"] = num_perm;
  return rep;
}

}  // namespace isoss

#endif  // ISOSS_STATS_HPP_
