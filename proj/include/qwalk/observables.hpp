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

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/walker.hpp"

namespace qwalk {

// Position distribution P(x) over a window, stamped with the step count.
class Distribution {
 public:
  Distribution(PositionWindow window, std::vector<double> probabilities,
               int t = 0)
      : window_(window), prob_(std::move(probabilities)), t_(t) {
    if (prob_.size() != static_cast<std::size_t>(window_.sites())) {
      throw std::invalid_argument("Distribution: expected " +
                                  std::to_string(window_.sites()) +
                                  " sites, got " +
                                  std::to_string(prob_.size()));
    }
  }

  const PositionWindow& window() const { return window_; }
  const std::vector<double>& probabilities() const { return prob_; }
  int t() const { return t_; }

  // Zero outside the window.
  double at(int x) const {
    return window_.contains(x) ? prob_[window_.site_index(x)] : 0.0;
  }

  double total() const {
    double s = 0.0;
    for (double v : prob_) s += v;
    return s;
  }

 private:
  PositionWindow window_;
  std::vector<double> prob_;
  int t_;
};

struct MomentRecord {
  int t = 0;
  double mean = 0.0;
  double second_moment = 0.0;
  double variance = 0.0;
};

inline Distribution distribution(const WalkerDensityMatrix& rho, int t = 0) {
  const PositionWindow& w = rho.window();
  const CMatrix& m = rho.matrix();
  std::vector<double> prob(static_cast<std::size_t>(w.sites()));
  for (Eigen::Index s = 0; s < w.sites(); ++s) {
    const cplx v = m(2 * s, 2 * s) + m(2 * s + 1, 2 * s + 1);
    if (std::abs(v.imag()) > tol::kAlgebraic) {
      throw NumericalInvariantError(
          "imaginary diagonal " + std::to_string(v.imag()) + " at x = " +
          std::to_string(w.position(s)));
    }
    if (v.real() < -tol::kAlgebraic) {
      throw NumericalInvariantError("negative probability at x = " +
                                    std::to_string(w.position(s)));
    }
    prob[static_cast<std::size_t>(s)] = v.real();
  }
  return {w, std::move(prob), t};
}

inline Distribution distribution_pure(const PureWalkerState& s, int t = 0) {
  const PositionWindow& w = s.window();
  std::vector<double> prob(static_cast<std::size_t>(w.sites()));
  for (Eigen::Index i = 0; i < w.sites(); ++i) {
    prob[static_cast<std::size_t>(i)] =
        std::norm(s.amplitudes()(2 * i)) + std::norm(s.amplitudes()(2 * i + 1));
  }
  return {w, std::move(prob), t};
}

inline MomentRecord moments(const Distribution& d) {
  const PositionWindow& w = d.window();
  double m1 = 0.0;
  double m2 = 0.0;
  for (int x = w.x_min(); x <= w.x_max(); ++x) {
    const double p = d.at(x);
    m1 += x * p;
    m2 += static_cast<double>(x) * x * p;
  }
  return {d.t(), m1, m2, m2 - m1 * m1};
}

// Tr(rho^2); for Hermitian rho this is the squared Frobenius norm.
inline double purity(const WalkerDensityMatrix& rho) {
  return rho.matrix().squaredNorm();
}

// out[(x,c),(y,b)] = rho[(x,b),(y,c)]
inline CMatrix partial_transpose_coin(const CMatrix& rho) {
  CMatrix out(rho.rows(), rho.cols());
  const Eigen::Index sites = rho.rows() / 2;
  for (Eigen::Index y = 0; y < sites; ++y) {
    for (Eigen::Index x = 0; x < sites; ++x) {
      out.block(2 * x, 2 * y, 2, 2) = rho.block(2 * x, 2 * y, 2, 2).transpose();
    }
  }
  return out;
}

inline CMatrix partial_transpose_coin(const WalkerDensityMatrix& rho) {
  return partial_transpose_coin(rho.matrix());
}

// out[(x,c),(y,b)] = rho[(y,c),(x,b)]
inline CMatrix partial_transpose_position(const CMatrix& rho) {
  CMatrix out(rho.rows(), rho.cols());
  const Eigen::Index sites = rho.rows() / 2;
  for (Eigen::Index y = 0; y < sites; ++y) {
    for (Eigen::Index x = 0; x < sites; ++x) {
      out.block(2 * x, 2 * y, 2, 2) = rho.block(2 * y, 2 * x, 2, 2);
    }
  }
  return out;
}

struct HermitianEigensystem {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // columns
};

namespace detail {
inline void require_hermitian(const CMatrix& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("hermitian eigensolve: matrix is not square");
  }
  const double err =
      m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (err > tol::kPsd) {
    throw std::invalid_argument(
        "hermitian eigensolve: input deviates from Hermitian by " +
        std::to_string(err));
  }
}
}  // namespace detail

inline HermitianEigensystem hermitian_eigensystem(const CMatrix& m) {
  detail::require_hermitian(m);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
  if (es.info() != Eigen::Success) {
    throw NumericalInvariantError("hermitian eigensolve did not converge");
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

inline std::vector<double> hermitian_eigenvalues(const CMatrix& m) {
  detail::require_hermitian(m);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalInvariantError("hermitian eigensolve did not converge");
  }
  const Eigen::VectorXd& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

namespace detail {

// Restricts rho to the sites |x| <= support; the dropped rows and columns
// are zero and contribute only zero eigenvalues.
inline CMatrix occupied_block(const WalkerDensityMatrix& rho) {
  const int r = std::max(rho.support_radius(), 0);
  const PositionWindow& w = rho.window();
  const Eigen::Index first = 2 * w.site_index(-r);
  const Eigen::Index size = 2 * static_cast<Eigen::Index>(2 * r + 1);
  return rho.matrix().block(first, first, size, size);
}

}  // namespace detail

// Negativity and the trace-norm excess it is tied to. `value` follows
// N = sum |lambda^-| over partial-transpose eigenvalues below -tol::kPsd,
// which also equals (||rho^PT||_1 - 1) / 2.
struct NegativityResult {
  double value = 0.0;
  double trace_norm_excess = 0.0;  // ||rho^PT||_1 - 1
};

inline NegativityResult negativity_detail(const WalkerDensityMatrix& rho) {
  const auto eig = hermitian_eigenvalues(
      partial_transpose_coin(detail::occupied_block(rho)));
  double neg = 0.0;
  double abs_sum = 0.0;
  for (double l : eig) {
    abs_sum += std::abs(l);
    if (l < -tol::kPsd) neg -= l;
  }
  NegativityResult res{neg, abs_sum - 1.0};
  if (std::abs(res.value - 0.5 * res.trace_norm_excess) > 1e-9) {
    throw NumericalInvariantError(
        "negativity routes disagree: " + std::to_string(res.value) + " vs " +
        std::to_string(0.5 * res.trace_norm_excess));
  }
  return res;
}

inline double negativity(const WalkerDensityMatrix& rho) {
  return negativity_detail(rho).value;
}

// Same quantity from the partial transpose over position.
inline double negativity_position_transpose(const WalkerDensityMatrix& rho) {
  const auto eig = hermitian_eigenvalues(
      partial_transpose_position(detail::occupied_block(rho)));
  double neg = 0.0;
  for (double l : eig) {
    if (l < -tol::kPsd) neg -= l;
  }
  return neg;
}

// Sum of |P(x+1) - P(x)| over the window, with P = 0 just outside it, so a
// point mass scores 2.
inline double total_variation(const Distribution& d) {
  const PositionWindow& w = d.window();
  double tv = 0.0;
  for (int x = w.x_min() - 1; x <= w.x_max(); ++x) {
    tv += std::abs(d.at(x + 1) - d.at(x));
  }
  return tv;
}

}  // namespace qwalk
