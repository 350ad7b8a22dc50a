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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "qwalk/observables.hpp"
#include "qwalk/walker.hpp"

namespace qwalk {
namespace {

constexpr double kPi = std::numbers::pi;
const PureCoinState kR{0.0, 0.0};
const PureCoinState kSymmetric{kPi / 4, kPi / 2};

WalkerDensityMatrix walk(const PureCoinState& c, const NoiseModel& noise, int t) {
  return evolve(init_state(c, t), noise, t).state;
}

WalkerDensityMatrix bell_like() {
  const PositionWindow w(1);
  CVector psi = CVector::Zero(w.dim());
  psi(w.state_index(0, Coin::R)) = 1.0 / std::numbers::sqrt2;
  psi(w.state_index(1, Coin::L)) = 1.0 / std::numbers::sqrt2;
  return {w, psi * psi.adjoint()};
}

CMatrix random_hermitian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  CMatrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = cplx(g(rng), g(rng));
  }
  return 0.5 * (a + a.adjoint());
}

// Random mixed state on the window: sum of a few weighted random projectors.
WalkerDensityMatrix random_state(std::mt19937_64& rng, int steps, int spread) {
  std::normal_distribution<double> g;
  const PositionWindow w(steps);
  CMatrix rho = CMatrix::Zero(w.dim(), w.dim());
  for (int k = 0; k < 3; ++k) {
    CVector v = CVector::Zero(w.dim());
    for (int x = -spread; x <= spread; ++x) {
      v(w.state_index(x, Coin::R)) = cplx(g(rng), g(rng));
      v(w.state_index(x, Coin::L)) = cplx(g(rng), g(rng));
    }
    v.normalize();
    rho += (k + 1) / 6.0 * v * v.adjoint();
  }
  return {w, rho};
}

TEST(Distribution, PointMass) {
  const auto d = distribution(init_state(kR, 2));
  EXPECT_EQ(d.at(0), 1.0);
  for (int x = -4; x <= 4; ++x) {
    if (x != 0) {
      EXPECT_EQ(d.at(x), 0.0);
    }
  }
  EXPECT_EQ(d.at(100), 0.0);
}

TEST(Distribution, CoherentTwoSteps) {
  const auto d = distribution(walk(kR, NoiseModel::coherent(), 2), 2);
  EXPECT_NEAR(d.at(2), 0.25, 1e-15);
  EXPECT_NEAR(d.at(0), 0.5, 1e-15);
  EXPECT_NEAR(d.at(-2), 0.25, 1e-15);
  EXPECT_EQ(d.t(), 2);
}

TEST(Distribution, SumsToOne) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) {
    EXPECT_NEAR(distribution(random_state(rng, 4, 3)).total(), 1.0, 1e-10);
  }
  EXPECT_NEAR(distribution(walk(kSymmetric, NoiseModel::tunneling(0.4), 25)).total(), 1.0,
              1e-10);
}

TEST(Distribution, RejectsImaginaryDiagonal) {
  const PositionWindow w(1);
  CMatrix m = CMatrix::Zero(w.dim(), w.dim());
  m(w.state_index(0, Coin::R), w.state_index(0, Coin::R)) = cplx(1.0, 1e-6);
  EXPECT_THROW(distribution(WalkerDensityMatrix(w, m)), NumericalInvariantError);
}

TEST(DistributionPure, MatchesDensityRoute) {
  auto s = PureWalkerState::localized(kSymmetric, 9);
  auto rho = init_state(kSymmetric, 9);
  for (int t = 0; t < 9; ++t) {
    s = coherent_step_pure(s);
    apply_step(rho, NoiseModel::coherent());
  }
  const auto a = distribution_pure(s);
  const auto b = distribution(rho);
  for (int x = -18; x <= 18; ++x) EXPECT_NEAR(a.at(x), b.at(x), 1e-14);
  EXPECT_EQ(distribution_pure(PureWalkerState::localized(kR, 3)).at(0), 1.0);
}

TEST(Moments, CoherentOneStep) {
  const auto m = moments(distribution(walk(kR, NoiseModel::coherent(), 1), 1));
  EXPECT_EQ(m.t, 1);
  EXPECT_NEAR(m.mean, 0.0, 1e-15);
  EXPECT_NEAR(m.second_moment, 1.0, 1e-15);
  EXPECT_NEAR(m.variance, 1.0, 1e-15);
}

TEST(Moments, PointMassIsZero) {
  const auto m = moments(distribution(init_state(kR, 3)));
  EXPECT_EQ(m.mean, 0.0);
  EXPECT_EQ(m.second_moment, 0.0);
  EXPECT_EQ(m.variance, 0.0);
}

TEST(Moments, TunnelingAddsPTToVariance) {
  const int t = 25;
  const double p = 0.4;
  const auto v0 = moments(distribution(walk(kSymmetric, NoiseModel::coherent(), t))).variance;
  const auto v1 = moments(distribution(walk(kSymmetric, NoiseModel::tunneling(p), t))).variance;
  EXPECT_NEAR(v1 - v0, p * t, 1e-9);
}

TEST(Purity, PureStateIsOne) {
  EXPECT_NEAR(purity(walk(kSymmetric, NoiseModel::coherent(), 15)), 1.0, 1e-12);
}

TEST(Purity, TunnelingDecaysFast) {
  EXPECT_LT(purity(walk(kR, NoiseModel::tunneling(0.5), 20)), 0.5);
}

TEST(Purity, MaximallyMixedOnSupport) {
  const PositionWindow w(3);
  CMatrix m = CMatrix::Zero(w.dim(), w.dim());
  const int n = 6;
  for (int i = 0; i < n; ++i) m(i + 2, i + 2) = 1.0 / n;
  EXPECT_NEAR(purity(WalkerDensityMatrix(w, m)), 1.0 / n, 1e-15);
}

TEST(PartialTranspose, ProductStateKeepsItsSpectrum) {
  const PositionWindow w(1);
  Eigen::MatrixXcd pos = Eigen::MatrixXcd::Zero(w.sites(), w.sites());
  pos(1, 1) = 0.6;
  pos(2, 2) = 0.4;
  pos(1, 2) = cplx(0.2, 0.1);
  pos(2, 1) = std::conj(pos(1, 2));
  const Eigen::Matrix2cd coin = PureCoinState{0.4, 1.3}.bloch().coin_matrix();
  CMatrix rho(w.dim(), w.dim());
  for (Eigen::Index x = 0; x < w.sites(); ++x) {
    for (Eigen::Index y = 0; y < w.sites(); ++y) {
      rho.block(2 * x, 2 * y, 2, 2) = pos(x, y) * coin;
    }
  }
  const auto a = hermitian_eigenvalues(rho);
  const auto b = hermitian_eigenvalues(partial_transpose_coin(rho));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  EXPECT_NEAR(negativity(WalkerDensityMatrix(w, rho)), 0.0, 1e-10);
}

TEST(PartialTranspose, BellLikeStateHasMinusHalf) {
  const auto eig = hermitian_eigenvalues(partial_transpose_coin(bell_like()));
  EXPECT_NEAR(eig.front(), -0.5, 1e-14);
}

TEST(PartialTranspose, IsAnInvolutionAndKeepsTraceAndHermiticity) {
  std::mt19937_64 rng(2);
  const auto rho = random_state(rng, 3, 2);
  const CMatrix pt = partial_transpose_coin(rho);
  EXPECT_EQ((partial_transpose_coin(pt) - rho.matrix()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LT((pt - pt.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(std::abs(pt.trace() - rho.trace()), 0.0, 1e-15);
  const CMatrix ptx = partial_transpose_position(rho.matrix());
  EXPECT_EQ((partial_transpose_position(ptx) - rho.matrix()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Negativity, BellLikeStateIsHalf) {
  const auto res = negativity_detail(bell_like());
  EXPECT_NEAR(res.value, 0.5, 1e-12);
  EXPECT_NEAR(res.trace_norm_excess, 1.0, 1e-12);
}

TEST(Negativity, SeparableIsZero) {
  EXPECT_NEAR(negativity(init_state(kSymmetric, 2)), 0.0, 1e-10);
  EXPECT_NEAR(negativity(walk(kR, NoiseModel::coin_measurement(1.0), 6)), 0.0, 1e-10);
}

TEST(Negativity, CoinAndPositionTransposesAgree) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 4; ++i) {
    const auto rho = random_state(rng, 3, 3);
    EXPECT_NEAR(negativity(rho), negativity_position_transpose(rho), 1e-9);
  }
  const auto walked = walk(kR, NoiseModel::tunneling(0.3), 15);
  EXPECT_NEAR(negativity(walked), negativity_position_transpose(walked), 1e-9);
}

// A two-level coin caps the partial-transpose trace norm at 2.
TEST(Negativity, BoundedByHalfForAQubitCoin) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 10; ++i) EXPECT_LE(negativity(random_state(rng, 3, 3)), 0.5 + 1e-12);
}

TEST(Negativity, CoherentWalkReachesAPlateau) {
  std::vector<double> curve;
  StepObserver obs = [&](int, const WalkerDensityMatrix& rho) { curve.push_back(negativity(rho)); };
  evolve(init_state(kR, 60), NoiseModel::coherent(), 60, {obs});
  double lo = 1.0, hi = 0.0;
  for (int t = 30; t <= 60; t += 2) {
    lo = std::min(lo, curve[t]);
    hi = std::max(hi, curve[t]);
  }
  EXPECT_LT(hi - lo, 0.002);
  EXPECT_GT(lo, 0.45);
  // Odd steps oscillate around the plateau with a shrinking swing.
  const double early = std::abs(curve[25] - curve[27]);
  const double late = std::abs(curve[57] - curve[59]);
  EXPECT_LT(late, early);
}

TEST(Negativity, CoinDecoherenceLosesMoreThanTunneling) {
  const int t = 30;
  for (double p : {0.3, 0.5, 0.8}) {
    const double coin = negativity(walk(kR, NoiseModel::coin_measurement(p), t));
    const double tun = negativity(walk(kR, NoiseModel::tunneling(p), t));
    EXPECT_LT(coin, tun) << "p=" << p;
  }
}

TEST(Negativity, CoinDecoherenceIsMonotoneInP) {
  const int t = 30;
  double prev = negativity(walk(kR, NoiseModel::coin_measurement(0.0), t));
  for (double p : {0.2, 0.4, 0.6, 0.8, 1.0}) {
    const double n = negativity(walk(kR, NoiseModel::coin_measurement(p), t));
    EXPECT_LE(n, prev + 1e-12) << "p=" << p;
    prev = n;
  }
}

TEST(Negativity, FullTunnelingKeepsEntanglement) {
  const auto res = negativity_detail(walk(kR, NoiseModel::tunneling(1.0), 30));
  EXPECT_GT(res.value, 0.3);
  EXPECT_GT(res.trace_norm_excess, 0.6);
}

TEST(Negativity, TunnelingTrendSplitsAroundHalf) {
  auto trend = [](double p) {
    std::vector<double> curve;
    StepObserver obs = [&](int, const WalkerDensityMatrix& rho) {
      curve.push_back(negativity(rho));
    };
    evolve(init_state(kSymmetric, 40), NoiseModel::tunneling(p), 40, {obs});
    return curve[40] - curve[10];
  };
  EXPECT_LT(trend(0.2), 0.0);
  EXPECT_GT(trend(0.8), 0.0);
}

TEST(TotalVariation, UniformAndPointMass) {
  const int t = 5;
  const PositionWindow w(t);
  const int n = w.sites();
  const Distribution uniform(w, std::vector<double>(n, 1.0 / n), t);
  EXPECT_NEAR(total_variation(uniform), 2.0 / (4 * t + 1), 1e-15);
  EXPECT_EQ(total_variation(distribution(init_state(kR, t))), 2.0);
}

TEST(TotalVariation, InvariantUnderReflection) {
  const auto d = distribution(walk(kR, NoiseModel::tunneling(0.2), 20), 20);
  std::vector<double> flipped(d.probabilities().rbegin(), d.probabilities().rend());
  EXPECT_NEAR(total_variation(d), total_variation(Distribution(d.window(), flipped, 20)), 1e-15);
}

TEST(TotalVariation, TunnelingSmoothsTheCoherentWalk) {
  const int t = 100;
  const double coherent = total_variation(distribution(walk(kR, NoiseModel::coherent(), t)));
  const double noisy = total_variation(distribution(walk(kR, NoiseModel::tunneling(0.5), t)));
  EXPECT_GT(coherent, noisy);
}

TEST(HermitianEigenvalues, DiagonalIsSorted) {
  CMatrix m = CMatrix::Zero(4, 4);
  m.diagonal() << 3.0, -1.0, 2.0, 0.5;
  const auto e = hermitian_eigenvalues(m);
  const std::vector<double> expected{-1.0, 0.5, 2.0, 3.0};
  for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(e[i], expected[i], 1e-15);
}

TEST(HermitianEigenvalues, PauliX) {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  const auto e = hermitian_eigenvalues(m);
  EXPECT_NEAR(e[0], -1.0, 1e-15);
  EXPECT_NEAR(e[1], 1.0, 1e-15);
}

TEST(HermitianEigenvalues, RandomReconstruction) {
  std::mt19937_64 rng(5);
  const CMatrix m = random_hermitian(rng, 50);
  const auto sys = hermitian_eigensystem(m);
  CMatrix rebuilt = CMatrix::Zero(50, 50);
  for (Eigen::Index i = 0; i < 50; ++i) {
    rebuilt += sys.values(i) * sys.vectors.col(i) * sys.vectors.col(i).adjoint();
  }
  EXPECT_LT((rebuilt - m).cwiseAbs().maxCoeff(), 1e-8);
  EXPECT_NEAR(sys.values.sum(), m.trace().real(), 1e-8 * 50);
  EXPECT_TRUE(std::is_sorted(sys.values.data(), sys.values.data() + 50));
}

TEST(HermitianEigenvalues, RejectsNonHermitian) {
  CMatrix m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;
  EXPECT_THROW(hermitian_eigenvalues(m), std::invalid_argument);
}

}  // namespace
}  // namespace qwalk
