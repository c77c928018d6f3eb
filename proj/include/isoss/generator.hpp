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
/// \brief The generator of a G-invariant process applied to product test
/// functions f(x) = g(log|x|) * h(<x/|x|, o>), o = (0, ..., 0, 1).
///
/// With u = log|x| and c = <x/|x|, o>:
///
///     Lf(x) = (a11/2) g''(u) h(c) + c1 g'(u) h(c)
///           + c_sph g(u) [(1 - c^2) h''(c) - (d - 1) c h'(c)]
///           + radial_rate  h(c) E[g(u + U) - g(u)]
///           + angular_rate g(u) E[h(c') - h(c); delta >= cutoff]
///
/// where U is a log-radial jump and c' the new cosine after an angular jump
/// of size delta: c' = c cos(delta) + sqrt(1 - c^2) sin(delta) w, with w the
/// projection of a uniform tangent direction on the meridian. The first three
/// terms are exact; the jump expectations use adaptive quadrature.

#ifndef ISOSS_GENERATOR_HPP_
#define ISOSS_GENERATOR_HPP_

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "isoss/factory.hpp"
#include "isoss/spherical.hpp"
#include "isoss/vec.hpp"

namespace isoss {

/// P(t) * exp(-(t - center)^2 / (2 width^2)); an infinite width drops the
/// Gaussian factor.
struct GaussPoly {
  std::vector<double> poly{1.0};  // coefficients, lowest degree first
  double center = 0.0;
  double width = std::numeric_limits<double>::infinity();

  struct Jet {
    double v, d1, d2;
  };

  Jet jet(double t) const {
    double p = 0.0, dp = 0.0, ddp = 0.0;
    for (std::size_t k = poly.size(); k-- > 0;) {
      ddp = ddp * t + 2.0 * dp;
      dp = dp * t + p;
      p = p * t + poly[k];
    }
    if (!std::isfinite(width)) return {p, dp, ddp};
    const double s2 = width * width;
    const double z = (t - center) / s2;  // -(d/dt) of the exponent
    const double e = std::exp(-0.5 * (t - center) * (t - center) / s2);
    return {p * e, (dp - p * z) * e, (ddp - 2.0 * dp * z - p / s2 + p * z * z) * e};
  }

  double operator()(double t) const { return jet(t).v; }
};

struct TestFunction {
  GaussPoly radial;   // g, in u = log|x|
  GaussPoly angular;  // h, in c = cos(angle to the north pole)

  double operator()(const Point& x) const {
    const double r = norm(x);
    return radial(std::log(r)) * angular(x.back() / r);
  }
};

struct GeneratorValue {
  double value = 0.0;
  double abs_error = 0.0;  // quadrature error estimate
};

namespace detail {

struct Quad {
  double value;
  double error;
};

template <class F>
Quad integrate_finite(F&& f, double a, double b) {
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13, &err);
  return {v, err};
}

template <class F>
Quad integrate_endpoint_singular(F&& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double err = 0.0;
  double l1 = 0.0;
  const double v = ts.integrate(f, a, b, 1e-13, &err, &l1);
  return {v, err * std::max(1.0, l1)};
}

// E over uniform tangent directions of F(w), w the meridian component.
template <class F>
Quad tangent_average(F&& f, std::size_t dim) {
  const std::size_t m = dim - 1;
  if (m == 1) return {0.5 * (f(1.0) + f(-1.0)), 0.0};
  // density of phi = acos(w) is sin^{m-2}(phi) / Z on [0, pi]
  const double expo = static_cast<double>(m) - 2.0;
  const double z = std::sqrt(std::numbers::pi) * std::tgamma(0.5 * (expo + 1.0)) /
                   std::tgamma(0.5 * (expo + 2.0));
  auto q = integrate_finite([&](double phi) { return f(std::cos(phi)) * std::pow(std::sin(phi), expo); },
                            0.0, std::numbers::pi);
  return {q.value / z, q.error / z};
}

// E[F(delta); delta >= cutoff] under the angle law.
template <class F>
Quad angle_expectation(const AngleLaw& law, F&& f) {
  const double pi = std::numbers::pi;
  switch (law.kind) {
    case AngleLaw::Kind::point_mass:
      return law.delta >= kAngularCutoff ? Quad{f(law.delta), 0.0} : Quad{0.0, 0.0};
    case AngleLaw::Kind::uniform: {
      auto q = integrate_finite(f, kAngularCutoff, pi);
      return {q.value / pi, q.error / pi};
    }
    case AngleLaw::Kind::beta: {
      const double norm_c = pi * boost::math::beta(law.a, law.b);
      auto dens = [&](double d) {
        const double s = d / pi;
        return f(d) * std::pow(s, law.a - 1.0) * std::pow(1.0 - s, law.b - 1.0) / norm_c;
      };
      return integrate_endpoint_singular(dens, kAngularCutoff, pi);
    }
  }
  return {0.0, 0.0};
}

template <class F>
Quad radial_expectation(const RadialJumpLaw& law, F&& f) {
  switch (law.kind) {
    case RadialJumpLaw::Kind::point_mass: return {f(law.p1), 0.0};
    case RadialJumpLaw::Kind::two_point: return {0.5 * (f(law.p1) + f(-law.p1)), 0.0};
    case RadialJumpLaw::Kind::normal: {
      const double mu = law.p1;
      const double sd = law.p2;
      auto dens = [&](double z) {
        return f(mu + sd * z) * std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
      };
      return integrate_finite(dens, -12.0, 12.0);
    }
    case RadialJumpLaw::Kind::uniform: {
      const double w = law.p2 - law.p1;
      auto q = integrate_finite(f, law.p1, law.p2);
      return {q.value / w, q.error / w};
    }
  }
  return {0.0, 0.0};
}

}  // namespace detail

/// Lf(x) without the killing term -gamma f(x).
inline GeneratorValue generator_apply_numeric(const GeneratorSpec& spec, const TestFunction& f,
                                              const Point& x) {
  spec.validate();
  if (x.size() != spec.dim) throw std::invalid_argument("generator_apply_numeric: wrong dimension");
  const double r = norm(x);
  if (!(r > 0.0)) throw std::domain_error("generator_apply_numeric: x outside E");
  const double u = std::log(r);
  const double c = std::clamp(x.back() / r, -1.0, 1.0);
  const double dm1 = static_cast<double>(spec.dim) - 1.0;

  const auto g = f.radial.jet(u);
  const auto h = f.angular.jet(c);
  GeneratorValue out;
  out.value = 0.5 * spec.a11 * g.d2 * h.v + spec.c1 * g.d1 * h.v +
              spec.angular.c_sph * g.v * ((1.0 - c * c) * h.d2 - dm1 * c * h.d1);

  if (spec.radial_jump_rate > 0.0) {
    auto q = detail::radial_expectation(spec.radial_jump_law,
                                        [&](double du) { return f.radial(u + du) - g.v; });
    out.value += spec.radial_jump_rate * h.v * q.value;
    out.abs_error += spec.radial_jump_rate * std::abs(h.v) * q.error;
  }
  if (spec.angular.jump_rate > 0.0) {
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    double inner_err = 0.0;
    auto q = detail::angle_expectation(spec.angular.jump_angle_law, [&](double delta) {
      const double cd = std::cos(delta);
      const double sd = std::sin(delta);
      auto t = detail::tangent_average(
          [&](double w) { return f.angular(std::clamp(c * cd + s * sd * w, -1.0, 1.0)); }, spec.dim);
      inner_err = std::max(inner_err, t.error);
      return t.value - h.v;
    });
    out.value += spec.angular.jump_rate * g.v * q.value;
    out.abs_error += spec.angular.jump_rate * std::abs(g.v) * (q.error + inner_err);
  }
  return out;
}

}  // namespace isoss

#endif  // ISOSS_GENERATOR_HPP_
