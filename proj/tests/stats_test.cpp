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

#include "isoss/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "support.hpp"

namespace isoss {
namespace {

// Brute-force sup |F_a - F_b| over the pooled sample.
double ks_distance_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  auto ecdf = [](const std::vector<double>& v, double x) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [x](double y) { return y <= x; })) /
           static_cast<double>(v.size());
  };
  double d = 0.0;
  for (const auto* v : {&a, &b}) {
    for (double x : *v) d = std::max(d, std::abs(ecdf(a, x) - ecdf(b, x)));
  }
  return d;
}

TEST(Kolmogorov, TabulatedValues) {
  // P(K > x) for the limiting Kolmogorov law.
  EXPECT_NEAR(kolmogorov_sf(0.5), 0.963945243, 1e-8);
  EXPECT_NEAR(kolmogorov_sf(1.0), 0.269999671, 1e-8);
  EXPECT_NEAR(kolmogorov_sf(1.358), 0.0500, 2e-4);
  EXPECT_NEAR(kolmogorov_sf(1.628), 0.0100, 1e-4);
  EXPECT_EQ(kolmogorov_sf(0.0), 1.0);
}

TEST(Kolmogorov, ContinuousAtSeriesSwitch) {
  EXPECT_NEAR(kolmogorov_sf(1.0 - 1e-12), kolmogorov_sf(1.0), 1e-10);
}

TEST(KsTwoSample, Examples) {
  const std::vector<double> a{1.0, 2.0, 3.0};
  const std::vector<double> b{1.5, 2.5, 3.5};
  EXPECT_NEAR(ks_two_sample(a, b).statistic, 1.0 / 3.0, 1e-15);
  const auto same = ks_two_sample(a, a);
  EXPECT_EQ(same.statistic, 0.0);
  EXPECT_EQ(same.p_value, 1.0);
  std::vector<double> lo(50), hi(50);
  for (int i = 0; i < 50; ++i) {
    lo[i] = i;
    hi[i] = 100 + i;
  }
  const auto apart = ks_two_sample(lo, hi);
  EXPECT_EQ(apart.statistic, 1.0);
  EXPECT_LT(apart.p_value, 1e-9);
  EXPECT_EQ(apart.n1, 50u);
  EXPECT_EQ(apart.n2, 50u);
}

TEST(KsTwoSample, MatchesBruteForceWithTies) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(17 + trial), b(31);
    for (auto& x : a) x = std::floor(5.0 * uniform_open(rng));
    for (auto& x : b) x = std::floor(6.0 * uniform_open(rng));
    EXPECT_NEAR(ks_two_sample(a, b).statistic, ks_distance_oracle(a, b), 1e-14);
  }
}

TEST(KsTwoSample, SymmetricAndMonotoneInvariant) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(40), b(60);
    for (auto& x : a) x = standard_normal(rng);
    for (auto& x : b) x = 0.3 + standard_normal(rng);
    const auto ab = ks_two_sample(a, b);
    const auto ba = ks_two_sample(b, a);
    EXPECT_EQ(ab.statistic, ba.statistic);
    EXPECT_EQ(ab.p_value, ba.p_value);
    std::vector<double> ea, eb;
    for (double x : a) ea.push_back(std::exp(x));
    for (double x : b) eb.push_back(std::exp(x));
    EXPECT_NEAR(ks_two_sample(ea, eb).statistic, ab.statistic, 1e-15);
  }
}

TEST(KsTwoSample, NullPValuesAreUniform) {
  Rng rng(3);
  std::vector<double> ps;
  for (int rep = 0; rep < 300; ++rep) {
    std::vector<double> a(500), b(500);
    for (auto& x : a) x = standard_normal(rng);
    for (auto& x : b) x = standard_normal(rng);
    ps.push_back(ks_two_sample(a, b).p_value);
  }
  EXPECT_GT(ks_uniform(ps).p_value, 0.01);
}

TEST(KsOneSample, StatisticMatchesOracle) {
  Rng rng(4);
  std::vector<double> a(25);
  for (auto& x : a) x = uniform_open(rng);
  std::vector<double> s = a;
  std::sort(s.begin(), s.end());
  double d = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double n = static_cast<double>(s.size());
    d = std::max({d, (i + 1) / n - s[i], s[i] - i / n});
  }
  EXPECT_NEAR(ks_uniform(a).statistic, d, 1e-15);
}

TEST(KsOneSample, DetectsWrongLaw) {
  Rng rng(5);
  std::vector<double> a(2000);
  for (auto& x : a) x = uniform_open(rng) * uniform_open(rng);
  EXPECT_LT(ks_uniform(a).p_value, 1e-6);
}

TEST(ChiSquare, Examples) {
  const std::vector<std::size_t> flat{10, 10, 10, 10};
  EXPECT_EQ(chi_square_uniform(flat).statistic, 0.0);
  EXPECT_NEAR(chi_square_uniform(flat).p_value, 1.0, 1e-15);
  const std::vector<std::size_t> lopsided{10, 0};
  const auto rep = chi_square_uniform(lopsided);
  EXPECT_NEAR(rep.statistic, 10.0, 1e-15);
  EXPECT_NEAR(rep.p_value, std::erfc(std::sqrt(5.0)), 1e-12);
}

TEST(Spearman, MatchesClosedFormWithoutTies) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 30;
    std::vector<double> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = standard_normal(rng);
      b[i] = a[i] + standard_normal(rng);
    }
    const auto ra = average_ranks(a);
    const auto rb = average_ranks(b);
    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
    const double nn = static_cast<double>(n);
    EXPECT_NEAR(spearman(a, b), 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0)), 1e-12);
  }
}

TEST(AverageRanks, Ties) {
  const std::vector<double> v{3.0, 1.0, 3.0, 2.0};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{3.5, 1.0, 3.5, 2.0}));
}

TEST(Independence, PerfectDependenceHitsFloor) {
  std::vector<std::pair<double, double>> pairs;
  for (int i = 0; i < 200; ++i) pairs.emplace_back(i, std::exp(0.01 * i));
  Rng rng(7);
  const auto rep = independence_check(pairs, 999, rng);
  EXPECT_NEAR(rep.statistic, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(rep.p_value, 1.0 / 1000.0);
}

TEST(Independence, RankInvariant) {
  Rng data(8);
  std::vector<std::pair<double, double>> pairs, mapped;
  for (int i = 0; i < 300; ++i) {
    const double x = standard_normal(data);
    const double y = 0.1 * x + standard_normal(data);
    pairs.emplace_back(x, y);
    mapped.emplace_back(std::exp(x), y * y * y);
  }
  Rng r1(9), r2(9);
  const auto a = independence_check(pairs, 500, r1);
  const auto b = independence_check(mapped, 500, r2);
  EXPECT_NEAR(a.statistic, b.statistic, 1e-12);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(Independence, RejectsTooFewPermutations) {
  std::vector<std::pair<double, double>> pairs{{1, 2}, {2, 3}, {3, 1}};
  Rng rng(10);
  EXPECT_THROW(independence_check(pairs, 100, rng), std::invalid_argument);
}

TEST(Independence, NullPValuesAreUniform) {
  Rng rng(11);
  std::vector<double> ps;
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<std::pair<double, double>> pairs;
    for (int i = 0; i < 100; ++i) pairs.emplace_back(standard_normal(rng), standard_normal(rng));
    ps.push_back(independence_check(pairs, 299, rng).p_value);
  }
  EXPECT_GT(ks_uniform(ps).p_value, 0.01);
}

}  // namespace
}  // namespace isoss
