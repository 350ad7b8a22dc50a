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

// State types, the Hadamard walk step and the two decoherence channels.
//
// Coin basis ordering is (R, L): R is the +1 eigenvector of sigma_z and moves
// the walker from x to x + 1, L moves it to x - 1. Joint states are indexed
// position-major, state_index(x, c) = 2 * (x - x_min) + c.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qwalk/error.hpp"

namespace qwalk {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

enum class Coin : int { R = 0, L = 1 };

// Shift applied to the R component; L moves the opposite way.
inline constexpr int kRShift = +1;

namespace tol {
inline constexpr double kAlgebraic = 1e-12;
inline constexpr double kDrift = 1e-10;
inline constexpr double kPsd = 1e-10;
}  // namespace tol

// Sites [-2T, 2T] for a run of at most T steps. A coin shift moves one site
// per step and a tunnel event at most one more, so T steps never leave it.
class PositionWindow {
 public:
  explicit PositionWindow(int total_steps) : steps_(total_steps) {
    if (total_steps < 0) {
      throw std::invalid_argument("PositionWindow: total_steps must be >= 0");
    }
  }

  int total_steps() const { return steps_; }
  int x_min() const { return -2 * steps_; }
  int x_max() const { return 2 * steps_; }
  int sites() const { return 4 * steps_ + 1; }
  Eigen::Index dim() const { return 2 * static_cast<Eigen::Index>(sites()); }

  bool contains(int x) const { return x >= x_min() && x <= x_max(); }

  Eigen::Index site_index(int x) const {
    if (!contains(x)) {
      throw std::out_of_range("position " + std::to_string(x) +
                              " outside window [" + std::to_string(x_min()) +
                              ", " + std::to_string(x_max()) + "]");
    }
    return x + 2 * steps_;
  }

  int position(Eigen::Index site) const {
    return static_cast<int>(site) - 2 * steps_;
  }

  Eigen::Index state_index(int x, Coin c) const {
    return 2 * site_index(x) + static_cast<int>(c);
  }

  bool operator==(const PositionWindow&) const = default;

 private:
  int steps_;
};

// Pauli-basis coordinates of a 2x2 coin density matrix,
// rho = r0 I + r1 sx + r2 sy + r3 sz.
struct BlochVector {
  double r0 = 0.5;
  double r1 = 0.0;
  double r2 = 0.0;
  double r3 = 0.0;

  double norm_squared() const { return r1 * r1 + r2 * r2 + r3 * r3; }

  void validate() const {
    if (std::abs(r0 - 0.5) > tol::kAlgebraic) {
      throw std::invalid_argument("BlochVector: r0 must equal 1/2");
    }
    if (norm_squared() > 0.25 + tol::kAlgebraic) {
      throw std::invalid_argument(
          "BlochVector: r1^2 + r2^2 + r3^2 must not exceed 1/4");
    }
  }

  Eigen::Matrix2cd coin_matrix() const {
    Eigen::Matrix2cd m;
    m << cplx(r0 + r3, 0.0), cplx(r1, -r2),  //
        cplx(r1, r2), cplx(r0 - r3, 0.0);
    return m;
  }
};

// cos(theta)|R> + exp(i phi) sin(theta)|L>.
struct PureCoinState {
  double theta = 0.0;
  double phi = 0.0;

  void validate() const {
    if (!(theta >= 0.0 && theta <= std::numbers::pi)) {
      throw std::invalid_argument("PureCoinState: theta must lie in [0, pi]");
    }
    if (!(phi >= 0.0 && phi < 2.0 * std::numbers::pi)) {
      throw std::invalid_argument("PureCoinState: phi must lie in [0, 2 pi)");
    }
  }

  Eigen::Vector2cd amplitudes() const {
    return {cplx(std::cos(theta), 0.0),
            std::polar(std::sin(theta), phi)};
  }

  BlochVector bloch() const {
    const double s2 = std::sin(2.0 * theta);
    return {0.5, 0.5 * std::cos(phi) * s2, 0.5 * std::sin(phi) * s2,
            0.5 * std::cos(2.0 * theta)};
  }
};

class NoiseModel {
 public:
  enum class Kind { coherent, tunneling, coin_measurement };

  static NoiseModel coherent() { return {Kind::coherent, 0.0}; }
  static NoiseModel tunneling(double p) { return {Kind::tunneling, p}; }
  static NoiseModel coin_measurement(double p) {
    return {Kind::coin_measurement, p};
  }

  Kind kind() const { return kind_; }
  double p() const { return p_; }

  // Largest position displacement one step can produce.
  int reach() const { return kind_ == Kind::tunneling && p_ > 0.0 ? 2 : 1; }

 private:
  NoiseModel(Kind kind, double p) : kind_(kind), p_(p) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("NoiseModel: p must lie in [0, 1], got " +
                                  std::to_string(p));
    }
  }

  Kind kind_;
  double p_;
};

inline std::string to_string(NoiseModel::Kind kind) {
  switch (kind) {
    case NoiseModel::Kind::coherent:
      return "coherent";
    case NoiseModel::Kind::tunneling:
      return "tunneling";
    case NoiseModel::Kind::coin_measurement:
      return "coin_measurement";
  }
  return "unknown";
}

namespace detail {

// Largest |x| carrying a nonzero entry in any row or column, -1 if empty.
inline int support_radius(const PositionWindow& w, const CMatrix& m) {
  for (int r = w.x_max(); r >= 0; --r) {
    for (int x : {-r, r}) {
      const Eigen::Index s = 2 * w.site_index(x);
      if (m.middleRows(s, 2).cwiseAbs().maxCoeff() > 0.0 ||
          m.middleCols(s, 2).cwiseAbs().maxCoeff() > 0.0) {
        return r;
      }
    }
  }
  return -1;
}

inline int support_radius(const PositionWindow& w, const CVector& v) {
  for (int r = w.x_max(); r >= 0; --r) {
    for (int x : {-r, r}) {
      if (v.segment(2 * w.site_index(x), 2).cwiseAbs().maxCoeff() > 0.0) {
        return r;
      }
    }
  }
  return -1;
}

}  // namespace detail

class PureWalkerState {
 public:
  PureWalkerState(PositionWindow window, CVector amplitudes)
      : window_(window), amps_(std::move(amplitudes)) {
    if (amps_.size() != window_.dim()) {
      throw std::invalid_argument("PureWalkerState: amplitude length " +
                                  std::to_string(amps_.size()) +
                                  " does not match window dimension " +
                                  std::to_string(window_.dim()));
    }
    support_ = detail::support_radius(window_, amps_);
  }

  static PureWalkerState localized(const PureCoinState& coin,
                                   int total_steps) {
    coin.validate();
    PositionWindow w(total_steps);
    CVector amps = CVector::Zero(w.dim());
    amps.segment(w.state_index(0, Coin::R), 2) = coin.amplitudes();
    return {w, std::move(amps)};
  }

  const PositionWindow& window() const { return window_; }
  const CVector& amplitudes() const { return amps_; }
  int support_radius() const { return support_; }

  cplx amplitude(int x, Coin c) const { return amps_(window_.state_index(x, c)); }
  double norm_squared() const { return amps_.squaredNorm(); }

 private:
  friend PureWalkerState coherent_step_pure(const PureWalkerState&);

  PositionWindow window_;
  CVector amps_;
  int support_;  // upper bound on max |x| with nonzero amplitude
};

class WalkerDensityMatrix {
 public:
  WalkerDensityMatrix(PositionWindow window, CMatrix rho)
      : window_(window), rho_(std::move(rho)) {
    if (rho_.rows() != window_.dim() || rho_.cols() != window_.dim()) {
      throw std::invalid_argument(
          "WalkerDensityMatrix: matrix shape does not match window dimension " +
          std::to_string(window_.dim()));
    }
    support_ = detail::support_radius(window_, rho_);
  }

  static WalkerDensityMatrix from_pure(const PureWalkerState& s) {
    return {s.window(), s.amplitudes() * s.amplitudes().adjoint()};
  }

  const PositionWindow& window() const { return window_; }
  const CMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }

  // Upper bound on the largest |x| with a nonzero entry; -1 when empty.
  int support_radius() const { return support_; }

  cplx operator()(int x, Coin c, int y, Coin b) const {
    return rho_(window_.state_index(x, c), window_.state_index(y, b));
  }

  cplx trace() const { return rho_.trace(); }

 private:
  friend void apply_step(WalkerDensityMatrix&, const NoiseModel&);
  friend void apply_step_with_shift(WalkerDensityMatrix&, const NoiseModel&,
                                    int);

  PositionWindow window_;
  CMatrix rho_;
  int support_;
};

// Walker localized at x = 0 with coin density matrix r0 I + sum_i r_i sigma_i.
inline WalkerDensityMatrix init_state(const BlochVector& r, int total_steps) {
  r.validate();
  PositionWindow w(total_steps);
  CMatrix rho = CMatrix::Zero(w.dim(), w.dim());
  const Eigen::Index i0 = w.state_index(0, Coin::R);
  rho.block(i0, i0, 2, 2) = r.coin_matrix();
  return {w, std::move(rho)};
}

inline WalkerDensityMatrix init_state(const PureCoinState& coin,
                                      int total_steps) {
  coin.validate();
  return init_state(coin.bloch(), total_steps);
}

struct StateDiagnostics {
  double hermiticity_error = 0.0;  // max |rho - rho^dagger| elementwise
  double trace_error = 0.0;        // |Tr rho - 1|
  double min_eigenvalue = 0.0;

  bool ok() const {
    return hermiticity_error <= tol::kAlgebraic &&
           trace_error <= tol::kDrift && min_eigenvalue >= -tol::kPsd;
  }
};

inline StateDiagnostics diagnose(const WalkerDensityMatrix& rho) {
  const CMatrix& m = rho.matrix();
  StateDiagnostics d;
  d.hermiticity_error = (m - m.adjoint()).cwiseAbs().maxCoeff();
  d.trace_error = std::abs(m.trace() - cplx(1.0, 0.0));
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  d.min_eigenvalue = es.eigenvalues().minCoeff();
  return d;
}

namespace detail {

inline void require_margin(const PositionWindow& w, int support, int reach) {
  if (support + reach > w.x_max()) {
    throw WindowOverflow("step would move support radius " +
                         std::to_string(support) + " by " +
                         std::to_string(reach) + " past window edge " +
                         std::to_string(w.x_max()));
  }
}

// Applies U_w = S (I (x) H) to every column of a block covering contiguous
// sites. The outermost site of the block must be empty on input.
inline CMatrix walk_columns(const CMatrix& in, int r_shift) {
  const double h = 1.0 / std::numbers::sqrt2;
  const Eigen::Index sites = in.rows() / 2;
  CMatrix out = CMatrix::Zero(in.rows(), in.cols());
  for (Eigen::Index i = 0; i < sites; ++i) {
    const Eigen::Index to_r = i + r_shift;
    const Eigen::Index to_l = i - r_shift;
    const bool r_ok = to_r >= 0 && to_r < sites;
    const bool l_ok = to_l >= 0 && to_l < sites;
    for (Eigen::Index j = 0; j < in.cols(); ++j) {
      const cplx a = in(2 * i, j);
      const cplx b = in(2 * i + 1, j);
      if (a == 0.0 && b == 0.0) continue;
      if (!r_ok || !l_ok) {
        throw WindowOverflow("walk step left the working block");
      }
      out(2 * to_r, j) += h * (a + b);
      out(2 * to_l + 1, j) += h * (a - b);
    }
  }
  return out;
}

// rho -> U_w rho U_w^dagger on a block.
inline CMatrix conjugate_by_walk(const CMatrix& block, int r_shift) {
  const CMatrix left = walk_columns(block, r_shift);
  return walk_columns(left.adjoint(), r_shift).adjoint();
}

// Position shift S_d acting from both sides: out[(x,c),(y,b)] += w * in[(x-d,c),(y-d,b)].
inline void add_shifted(const CMatrix& in, CMatrix& out, int d, double weight) {
  const Eigen::Index n = in.rows() - 2 * std::abs(d);
  if (d > 0) {
    out.block(2 * d, 2 * d, n, n) += weight * in.block(0, 0, n, n);
  } else {
    out.block(0, 0, n, n) += weight * in.block(-2 * d, -2 * d, n, n);
  }
}

inline void apply_noise_block(CMatrix& m, const NoiseModel& noise) {
  const double p = noise.p();
  switch (noise.kind()) {
    case NoiseModel::Kind::coherent:
      return;
    case NoiseModel::Kind::tunneling: {
      if (p == 0.0) return;
      CMatrix out = (1.0 - p) * m;
      add_shifted(m, out, +1, 0.5 * p);
      add_shifted(m, out, -1, 0.5 * p);
      m = std::move(out);
      return;
    }
    case NoiseModel::Kind::coin_measurement: {
      if (p == 0.0) return;
      // P_R M P_R + P_L M P_L keeps coin-diagonal entries only.
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 1 - (j % 2); i < m.rows(); i += 2) {
          m(i, j) *= (1.0 - p);
        }
      }
      return;
    }
  }
}

}  // namespace detail

inline void apply_step_with_shift(WalkerDensityMatrix& rho,
                                  const NoiseModel& noise, int r_shift) {
  const PositionWindow& w = rho.window_;
  const int reach = noise.reach();
  const int r = rho.support_;
  if (r < 0) return;
  detail::require_margin(w, r, reach);
  const int outer = r + reach;
  const Eigen::Index first = 2 * w.site_index(-outer);
  const Eigen::Index size = 2 * static_cast<Eigen::Index>(2 * outer + 1);
  CMatrix block =
      detail::conjugate_by_walk(rho.rho_.block(first, first, size, size), r_shift);
  detail::apply_noise_block(block, noise);
  rho.rho_.block(first, first, size, size) = block;
  rho.support_ = outer;
}

// One step of the selected channel in place. Each Kraus operator maps a basis
// element to a single basis element, so the update is done structurally on
// the occupied block in O(N^2).
inline void apply_step(WalkerDensityMatrix& rho, const NoiseModel& noise) {
  apply_step_with_shift(rho, noise, kRShift);
}

inline PureWalkerState coherent_step_pure(const PureWalkerState& s) {
  const PositionWindow& w = s.window();
  PureWalkerState next = s;
  if (s.support_ < 0) return next;
  detail::require_margin(w, s.support_, 1);
  const int outer = s.support_ + 1;
  const Eigen::Index first = 2 * w.site_index(-outer);
  const Eigen::Index size = 2 * static_cast<Eigen::Index>(2 * outer + 1);
  CMatrix col = s.amps_.segment(first, size);
  next.amps_.segment(first, size) = detail::walk_columns(col, kRShift).col(0);
  next.support_ = outer;
  return next;
}

inline WalkerDensityMatrix coherent_step_density(WalkerDensityMatrix rho) {
  apply_step(rho, NoiseModel::coherent());
  return rho;
}

inline WalkerDensityMatrix tunneling_step(WalkerDensityMatrix rho, double p) {
  apply_step(rho, NoiseModel::tunneling(p));
  return rho;
}

inline WalkerDensityMatrix coin_measure_step(WalkerDensityMatrix rho,
                                             double p) {
  apply_step(rho, NoiseModel::coin_measurement(p));
  return rho;
}

using StepObserver = std::function<void(int step, const WalkerDensityMatrix&)>;

struct StepRecord {
  int t = 0;
  double trace_error = 0.0;
  int support_radius = 0;
};

struct EvolveResult {
  WalkerDensityMatrix state;
  std::vector<StepRecord> records;
};

// Applies the channel `steps` times, calling every observer after each step
// (and once with step 0 before the first). Throws NumericalInvariantError if
// the trace drifts by more than tol::kDrift.
inline EvolveResult evolve(WalkerDensityMatrix rho, const NoiseModel& noise,
                           int steps,
                           const std::vector<StepObserver>& observers = {}) {
  if (steps < 0 || steps > rho.window().total_steps()) {
    throw std::invalid_argument("evolve: steps must lie in [0, " +
                                std::to_string(rho.window().total_steps()) +
                                "]");
  }
  std::vector<StepRecord> records;
  records.reserve(static_cast<std::size_t>(steps) + 1);
  auto record = [&](int t) {
    const double err = std::abs(rho.trace() - cplx(1.0, 0.0));
    if (err > tol::kDrift) {
      throw NumericalInvariantError("trace drifted by " + std::to_string(err) +
                                    " at step " + std::to_string(t));
    }
    records.push_back({t, err, rho.support_radius()});
    for (const auto& obs : observers) obs(t, rho);
  };
  record(0);
  for (int t = 1; t <= steps; ++t) {
    apply_step(rho, noise);
    record(t);
  }
  return {std::move(rho), std::move(records)};
}

// Dense Kraus operators of one step on the window. Columns whose image would
// leave the window are dropped, so completeness only holds on interior sites.
inline std::vector<CMatrix> kraus_operators(const NoiseModel& noise,
                                            const PositionWindow& w,
                                            int r_shift = kRShift) {
  const Eigen::Index n = w.dim();
  const double h = 1.0 / std::numbers::sqrt2;
  CMatrix walk = CMatrix::Zero(n, n);
  for (int x = w.x_min(); x <= w.x_max(); ++x) {
    for (Coin c : {Coin::R, Coin::L}) {
      const Eigen::Index col = w.state_index(x, c);
      const double sign = c == Coin::R ? 1.0 : -1.0;
      if (w.contains(x + r_shift)) walk(w.state_index(x + r_shift, Coin::R), col) = h;
      if (w.contains(x - r_shift)) walk(w.state_index(x - r_shift, Coin::L), col) = sign * h;
    }
  }
  auto shift = [&](int d) {
    CMatrix s = CMatrix::Zero(n, n);
    for (int x = w.x_min(); x <= w.x_max(); ++x) {
      if (!w.contains(x + d)) continue;
      for (Coin c : {Coin::R, Coin::L}) {
        s(w.state_index(x + d, c), w.state_index(x, c)) = 1.0;
      }
    }
    return s;
  };
  auto coin_projector = [&](Coin keep) {
    CMatrix pr = CMatrix::Zero(n, n);
    for (int x = w.x_min(); x <= w.x_max(); ++x) {
      const Eigen::Index i = w.state_index(x, keep);
      pr(i, i) = 1.0;
    }
    return pr;
  };

  const double p = noise.p();
  std::vector<CMatrix> ops;
  auto push = [&](double weight, CMatrix op) {
    if (weight > 0.0) ops.push_back(std::sqrt(weight) * op);
  };
  switch (noise.kind()) {
    case NoiseModel::Kind::coherent:
      ops.push_back(walk);
      break;
    case NoiseModel::Kind::tunneling:
      push(1.0 - p, walk);
      push(0.5 * p, shift(+1) * walk);
      push(0.5 * p, shift(-1) * walk);
      break;
    case NoiseModel::Kind::coin_measurement:
      push(1.0 - p, walk);
      push(p, coin_projector(Coin::R) * walk);
      push(p, coin_projector(Coin::L) * walk);
      break;
  }
  return ops;
}

// sum_n E_n rho E_n^dagger with dense operators; the reference definition the
// structural step is checked against.
inline WalkerDensityMatrix apply_channel_dense(const WalkerDensityMatrix& rho,
                                               const std::vector<CMatrix>& ops) {
  CMatrix out = CMatrix::Zero(rho.dim(), rho.dim());
  for (const auto& e : ops) out += e * rho.matrix() * e.adjoint();
  return {rho.window(), std::move(out)};
}

struct KrausCheck {
  bool complete = false;
  double max_deviation = 0.0;
  std::size_t operator_count = 0;
};

// Verifies sum_n E_n^dagger E_n = I on sites at least `reach` from the edge.
inline KrausCheck kraus_completeness_check(const NoiseModel& noise,
                                           int window_steps = 3,
                                           int r_shift = kRShift) {
  const PositionWindow w(window_steps);
  const auto ops = kraus_operators(noise, w, r_shift);
  CMatrix sum = CMatrix::Zero(w.dim(), w.dim());
  for (const auto& e : ops) sum += e.adjoint() * e;
  const int inner = w.x_max() - noise.reach();
  const Eigen::Index first = 2 * w.site_index(-inner);
  const Eigen::Index size = 2 * static_cast<Eigen::Index>(2 * inner + 1);
  const CMatrix dev =
      sum.block(first, first, size, size) - CMatrix::Identity(size, size);
  KrausCheck check;
  check.max_deviation = dev.cwiseAbs().maxCoeff();
  check.complete = check.max_deviation < tol::kAlgebraic;
  check.operator_count = ops.size();
  return check;
}

}  // namespace qwalk
