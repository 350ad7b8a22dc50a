// Copyright 2026 The qwalk Authors
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

#pragma once

// Closed-form long-time moments of the tunneling walk and the exact
// convolution that maps a coherent distribution onto its decoherent one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/walker.hpp"

namespace qwalk::analytic {

inline constexpr double kAlpha = 1.0 - 1.0 / std::numbers::sqrt2;
// Long-time offset of the second moment, 3 sqrt(2) / 8.
inline constexpr double kSecondMomentOffset = 3.0 * std::numbers::sqrt2 / 8.0;

// V(t) = A t^2 + B t + C.
struct VarianceCoefficients {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;

  double operator()(double t) const { return (A * t + B) * t + C; }
};

namespace detail {
inline void require_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("p must lie in [0, 1], got " +
                                std::to_string(p));
  }
}
}  // namespace detail

inline VarianceCoefficients variance_coefficients(const BlochVector& r,
                                                  double p) {
  r.validate();
  detail::require_probability(p);
  const double a = kAlpha;
  const double s = r.r1 + r.r3;
  const double d = r.r3 - r.r1;
  return {a - 4.0 * a * a * s * s,
          2.0 * std::numbers::sqrt2 * a * (r.r3 * r.r3 - r.r1 * r.r1) + p,
          -0.5 * d * d + kSecondMomentOffset};
}

// Drift of the mean with the oscillatory term dropped; independent of p.
inline double analytic_first_moment(const BlochVector& r, int t) {
  r.validate();
  const double slope = (2.0 - std::numbers::sqrt2) * t;
  const double h = 1.0 / std::numbers::sqrt2;
  return (slope + h) * r.r1 + (slope - h) * r.r3;
}

// Independent of the initial state. The constant is a long-time offset and
// carries no meaning at t = 0.
inline double analytic_second_moment(double p, int t) {
  detail::require_probability(p);
  const double td = t;
  return kAlpha * td * td + td * p + kSecondMomentOffset;
}

inline double analytic_variance(const BlochVector& r, double p, int t) {
  return variance_coefficients(r, p)(t);
}

// Phase phi for which r1 + r3 = 0 (so A reaches its maximum alpha), i.e.
// cos(phi) = -cot(2 theta). Returned in [0, pi]; 2 pi - phi works as well.
inline double max_variance_phase(double theta) {
  const double s = std::sin(2.0 * theta);
  const double c = std::cos(2.0 * theta);
  if (std::abs(s) < 1e-15 || std::abs(c) > std::abs(s) * (1.0 + 1e-12)) {
    throw std::invalid_argument(
        "max_variance_phase: |cot(2 theta)| > 1, no phase zeroes r1 + r3");
  }
  const double cot = std::clamp(c / s, -1.0, 1.0);
  return std::acos(-cot);
}

inline Distribution coherent_reference(const PureCoinState& coin, int t) {
  PureWalkerState s = PureWalkerState::localized(coin, t);
  for (int i = 0; i < t; ++i) s = coherent_step_pure(s);
  return distribution_pure(s, t);
}

// Mixed initial coins go through the density-matrix walk.
inline Distribution coherent_reference(const BlochVector& r, int t) {
  WalkerDensityMatrix rho = init_state(r, t);
  for (int i = 0; i < t; ++i) apply_step(rho, NoiseModel::coherent());
  return distribution(rho, t);
}

namespace detail {

inline double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log(x) with log(0) = -inf, so zero weights come out exactly zero.
inline double safe_log(double x) {
  return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity();
}

// K(d) for d in [-t, t]: probability that t independent tunnel events
// (-1, 0, +1 with weights p/2, 1-p, p/2) add up to d. Grouped by the number n
// of moving steps, of which m move left: d = n - 2m.
inline std::vector<double> tunnel_kernel(int t, double p) {
  std::vector<double> kernel(static_cast<std::size_t>(2 * t + 1), 0.0);
  const double log_stay = safe_log(1.0 - p);
  const double log_move = safe_log(0.5 * p);
  for (int n = 0; n <= t; ++n) {
    const double stay_part = (t - n) == 0 ? 0.0 : (t - n) * log_stay;
    const double move_part = n == 0 ? 0.0 : n * log_move;
    const double log_w = log_choose(t, n) + stay_part + move_part;
    if (std::isinf(log_w)) continue;
    for (int m = 0; m <= n; ++m) {
      kernel[static_cast<std::size_t>(n - 2 * m + t)] +=
          std::exp(log_w + log_choose(n, m));
    }
  }
  return kernel;
}

inline Distribution convolve(const Distribution& p0,
                             const std::vector<double>& kernel, int t) {
  const PositionWindow& w = p0.window();
  std::vector<double> out(static_cast<std::size_t>(w.sites()), 0.0);
  for (int x = w.x_min(); x <= w.x_max(); ++x) {
    double acc = 0.0;
    for (int d = -t; d <= t; ++d) {
      const double k = kernel[static_cast<std::size_t>(d + t)];
      if (k == 0.0) continue;
      acc += k * p0.at(x - d);
    }
    out[static_cast<std::size_t>(w.site_index(x))] = acc;
  }
  Distribution result(w, std::move(out), p0.t());
  if (std::abs(result.total() - p0.total()) > tol::kDrift) {
    throw WindowOverflow(
        "decoherent distribution spills outside the window of P0");
  }
  return result;
}

}  // namespace detail

// P(x,t) = sum_{n=0}^{t} sum_{m=0}^{n} C(t,n) C(n,m) (1-p)^{t-n} (p/2)^n
//          P0(x + 2m - n, t)
// Binomials are taken in log space so large t does not overflow.
inline Distribution decoherent_distribution(const Distribution& p0, double p) {
  detail::require_probability(p);
  const int t = p0.t();
  return detail::convolve(p0, detail::tunnel_kernel(t, p), t);
}

// p = 1 specialization: P(x,t) = 2^{-t} sum_m C(t,m) P0(x + 2m - t, t).
// Only even sites are ever occupied.
inline Distribution full_noise_distribution(const Distribution& p0) {
  const int t = p0.t();
  std::vector<double> kernel(static_cast<std::size_t>(2 * t + 1), 0.0);
  const double log_half = -t * std::numbers::ln2;
  for (int m = 0; m <= t; ++m) {
    kernel[static_cast<std::size_t>(t - 2 * m + t)] =
        std::exp(detail::log_choose(t, m) + log_half);
  }
  return detail::convolve(p0, kernel, t);
}

}  // namespace qwalk::analytic
