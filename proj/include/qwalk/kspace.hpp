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

// Momentum-space view of the tunneling walk. A 2x2 coin operator O is
// represented by its Pauli coordinates r_i = Tr(sigma_i O) / 2, so every
// coin superoperator becomes a 4x4 matrix acting on (r0, r1, r2, r3).

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qwalk/walker.hpp"

namespace qwalk::kspace {

using Matrix2 = Eigen::Matrix2cd;
using AffineVector = Eigen::Vector4cd;
using Superop4 = Eigen::Matrix4cd;
using KrausSet = std::array<Matrix2, 3>;

inline constexpr double kFiniteDifferenceStep = 1e-6;

inline const std::array<Matrix2, 4>& pauli() {
  static const std::array<Matrix2, 4> sigma = [] {
    const cplx i(0.0, 1.0);
    std::array<Matrix2, 4> s;
    s[0] << 1.0, 0.0, 0.0, 1.0;
    s[1] << 0.0, 1.0, 1.0, 0.0;
    s[2] << 0.0, -i, i, 0.0;
    s[3] << 1.0, 0.0, 0.0, -1.0;
    return s;
  }();
  return sigma;
}

inline AffineVector to_affine(const Matrix2& o) {
  AffineVector r;
  for (int i = 0; i < 4; ++i) r(i) = 0.5 * (pauli()[i] * o).trace();
  return r;
}

inline Matrix2 from_affine(const AffineVector& r) {
  Matrix2 o = Matrix2::Zero();
  for (int i = 0; i < 4; ++i) o += r(i) * pauli()[i];
  return o;
}

inline AffineVector affine(const BlochVector& r) {
  return {r.r0, r.r1, r.r2, r.r3};
}

// Trace of the 2x2 operator behind an affine vector.
inline cplx affine_trace(const AffineVector& r) { return 2.0 * r(0); }

// One coherent step at momentum k: diag(e^{-ik}, e^{ik}) H.
inline Matrix2 walk_matrix(double k) {
  const double h = 1.0 / std::numbers::sqrt2;
  const cplx em = std::polar(h, -k);
  const cplx ep = std::polar(h, k);
  Matrix2 u;
  u << em, em, ep, -ep;
  return u;
}

// Kraus set of the tunneling step at momentum k, factored through U(k).
inline KrausSet coin_kraus_k(double p, double k) {
  const Matrix2 u = walk_matrix(k);
  const double side = std::sqrt(0.5 * p);
  return {std::sqrt(1.0 - p) * u, side * std::polar(1.0, -k) * u,
          side * std::polar(1.0, k) * u};
}

// Same set written out entry by entry.
inline KrausSet coin_kraus_k_explicit(double p, double k) {
  const double a = std::sqrt(0.5 * (1.0 - p));
  const double b = 0.5 * std::sqrt(p);
  const cplx e1 = std::polar(1.0, k);
  const cplx em1 = std::polar(1.0, -k);
  const cplx e2 = std::polar(1.0, 2.0 * k);
  const cplx em2 = std::polar(1.0, -2.0 * k);
  KrausSet c;
  c[0] << a * em1, a * em1, a * e1, -a * e1;
  c[1] << b * em2, b * em2, b, -b;
  c[2] << b, b, b * e2, -b * e2;
  return c;
}

// Matrix of O -> sum_n left_n O right_n^dagger in the affine basis.
inline Superop4 superop_from_pairs(const KrausSet& left,
                                   const KrausSet& right) {
  Superop4 s;
  for (int j = 0; j < 4; ++j) {
    Matrix2 image = Matrix2::Zero();
    for (std::size_t n = 0; n < left.size(); ++n) {
      image += left[n] * pauli()[j] * right[n].adjoint();
    }
    s.col(j) = to_affine(image);
  }
  return s;
}

// L_k. Independent of p.
inline Superop4 build_L(double k) {
  const double s = std::sin(2.0 * k);
  const double c = std::cos(2.0 * k);
  Superop4 m;
  m << 1, 0, 0, 0,  //
      0, 0, s, c,   //
      0, 0, -c, s,  //
      0, 1, 0, 0;
  return m;
}

inline AffineVector apply_L_direct(double k, double p, const AffineVector& v) {
  const Matrix2 o = from_affine(v);
  Matrix2 image = Matrix2::Zero();
  for (const auto& c : coin_kraus_k(p, k)) image += c * o * c.adjoint();
  return to_affine(image);
}

// G_k O = sum_n C_n'(k) O C_n(k)^dagger.
inline Superop4 build_G(double k) {
  const double s = std::sin(2.0 * k);
  const double c = std::cos(2.0 * k);
  const cplx i(0.0, 1.0);
  Superop4 m;
  m << 0, -i, 0, 0,  //
      0, 0, c, -s,   //
      0, 0, s, c,    //
      -i, 0, 0, 0;
  return m;
}

// In the affine basis the adjoint superoperator is the entrywise conjugate.
inline Superop4 build_G_adjoint(double k) { return build_G(k).conjugate(); }

// J_k O = sum_n C_n'(k) O C_n'(k)^dagger, with q = p - 1 in the middle rows.
inline Superop4 build_J(double k, double p) {
  const double s = std::sin(2.0 * k);
  const double c = std::cos(2.0 * k);
  const double q = p - 1.0;
  Superop4 m;
  m << 1 + p, 0, 0, 0,     //
      0, 0, q * s, q * c,  //
      0, 0, -q * c, q * s, //
      0, 1 + p, 0, 0;
  return m;
}

// sigma_z W_k(O) sigma_z + p W_k(O) with W_k(O) = U(k) O U(k)^dagger; the
// operator form of J_k that fixes q = p - 1.
inline AffineVector apply_J_via_walk(double k, double p, const AffineVector& v) {
  const Matrix2 u = walk_matrix(k);
  const Matrix2 w = u * from_affine(v) * u.adjoint();
  const Matrix2& z = pauli()[3];
  return to_affine(z * w * z + p * w);
}

namespace detail {
inline KrausSet kraus_derivative(double p, double k, double h) {
  const KrausSet plus = coin_kraus_k(p, k + h);
  const KrausSet minus = coin_kraus_k(p, k - h);
  KrausSet d;
  for (std::size_t n = 0; n < d.size(); ++n) {
    d[n] = (plus[n] - minus[n]) / (2.0 * h);
  }
  return d;
}
}  // namespace detail

// G_k and J_k from central differences of the Kraus matrices.
inline Superop4 build_G_numeric(double k, double p,
                                double h = kFiniteDifferenceStep) {
  return superop_from_pairs(detail::kraus_derivative(p, k, h),
                            coin_kraus_k(p, k));
}

inline Superop4 build_J_numeric(double k, double p,
                                double h = kFiniteDifferenceStep) {
  const KrausSet d = detail::kraus_derivative(p, k, h);
  return superop_from_pairs(d, d);
}

struct SpectralData {
  std::array<cplx, 4> eigenvalues;  // numerical, unordered
  std::array<cplx, 4> expected;     // {1, 1, e^{i(theta+pi)}, e^{-i(theta+pi)}}
  double theta = 0.0;               // cos(theta) = cos^2(k)
  double max_mismatch = 0.0;        // best pairing of the two multisets
};

namespace detail {
inline double multiset_distance(const std::array<cplx, 4>& a,
                                std::array<cplx, 4> b) {
  std::array<int, 4> perm{0, 1, 2, 3};
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
      worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    }
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}
}  // namespace detail

inline SpectralData L_spectrum(double k) {
  Eigen::ComplexEigenSolver<Superop4> es(build_L(k), false);
  if (es.info() != Eigen::Success) {
    throw NumericalInvariantError("L_k eigensolve did not converge");
  }
  SpectralData d;
  for (int i = 0; i < 4; ++i) d.eigenvalues[i] = es.eigenvalues()(i);
  const double ck = std::cos(k);
  d.theta = std::acos(std::clamp(ck * ck, -1.0, 1.0));
  const double phase = d.theta + std::numbers::pi;
  d.expected = {1.0, 1.0, std::polar(1.0, phase), std::polar(1.0, -phase)};
  d.max_mismatch = detail::multiset_distance(d.eigenvalues, d.expected);
  return d;
}

// Long-time closed form of sum_{m=1}^{t} L_k^{m-1}, oscillatory part dropped.
// The (r2, r2) entry is 2 (cos^2 k + t sin^2 k) / Delta.
inline Superop4 gamma_closed_form(double k, int t) {
  const double c2 = std::cos(k) * std::cos(k);
  const double s2 = std::sin(k) * std::sin(k);
  const double s2k = std::sin(2.0 * k);
  const double delta = 2.0 * (c2 + 1.0);
  const double td = t;
  Superop4 g;
  g << 2 * td * (c2 + 1), 0, 0, 0,                                    //
      0, 2 * td * c2 + 1, td * s2k, 2 * td * c2 - 1,                  //
      0, (td - 1) * s2k, 2 * (c2 + td * s2), td * s2k,                //
      0, 2 * (td - 1) * c2 + 1, (td - 1) * s2k, 2 * td * c2 + 1;
  return g / delta;
}

struct GammaComparison {
  Superop4 numeric;
  Superop4 closed;
  double max_abs_diff = 0.0;
};

inline GammaComparison gamma_partial_sum(double k, int t) {
  if (t < 1) throw std::invalid_argument("gamma_partial_sum: t must be >= 1");
  const double dist = std::abs(std::remainder(k, std::numbers::pi));
  if (dist < 1e-3) {
    throw std::invalid_argument(
        "gamma_partial_sum: k must stay 1e-3 away from multiples of pi");
  }
  const Superop4 l = build_L(k);
  Superop4 power = Superop4::Identity();
  Superop4 sum = Superop4::Zero();
  for (int m = 1; m <= t; ++m) {
    sum += power;
    power = l * power;
  }
  GammaComparison g{sum, gamma_closed_form(k, t), 0.0};
  g.max_abs_diff = (g.numeric - g.closed).cwiseAbs().maxCoeff();
  return g;
}

struct MomentPair {
  double mean = 0.0;
  double second_moment = 0.0;
};

// First and second moments after t steps from the k-space sums
//   <x>   = i  int dk/2pi sum_m Tr G L^{m-1} rho0
//   <x^2> =    int dk/2pi sum_m sum_{m'<m} Tr[G^+ L^{m-m'-1} G L^{m'-1} rho0
//                                            + G L^{m-m'-1} G^+ L^{m'-1} rho0]
//            + int dk/2pi sum_m Tr J L^{m-1} rho0
// evaluated with the periodic trapezoid rule. The integrands are trigonometric
// polynomials of degree <= 2t in k, so k_points > 4t makes the rule exact.
inline MomentPair moment_crosscheck(const BlochVector& r, int t, double p = 0.0,
                                    int k_points = 4096) {
  r.validate();
  if (t < 0 || t > 60) {
    throw std::invalid_argument("moment_crosscheck: t must lie in [0, 60]");
  }
  if (k_points < 4 * t + 1) {
    throw std::invalid_argument("moment_crosscheck: too few k points");
  }
  const AffineVector v0 = affine(r);
  cplx mean = 0.0;
  cplx second = 0.0;
  for (int j = 0; j < k_points; ++j) {
    const double k = -std::numbers::pi + 2.0 * std::numbers::pi * j / k_points;
    const Superop4 l = build_L(k);
    const Superop4 g = build_G(k);
    const Superop4 gd = build_G_adjoint(k);
    const Superop4 jm = build_J(k, p);
    AffineVector v = v0;  // L^{m-1} v0
    // Running sums over m' < m of L^{m-m'-1} G L^{m'-1} v0 and its G^+ twin.
    AffineVector acc_g = AffineVector::Zero();
    AffineVector acc_gd = AffineVector::Zero();
    for (int m = 1; m <= t; ++m) {
      const AffineVector gv = g * v;
      mean += affine_trace(gv);
      second += affine_trace(gd * acc_g) + affine_trace(g * acc_gd) +
                affine_trace(jm * v);
      acc_g = l * acc_g + gv;
      acc_gd = l * acc_gd + gd * v;
      v = l * v;
    }
  }
  mean *= cplx(0.0, 1.0) / static_cast<double>(k_points);
  second /= static_cast<double>(k_points);
  return {mean.real(), second.real()};
}

}  // namespace qwalk::kspace
