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

// Self-check suite behind `qwalk verify`. Each check is small enough that the
// whole suite runs in seconds.

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qwalk/analytic.hpp"
#include "qwalk/kspace.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/walker.hpp"

namespace qwalk::verify {

struct CheckResult {
  std::string module;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Options {
  std::string only;  // module name, empty for all
  // Direction of the R shift used by the walker-core checks. Anything other
  // than +1 is a deliberate mutation to exercise the suite's sensitivity.
  int r_shift = kRShift;
};

inline const std::vector<std::string>& module_names() {
  static const std::vector<std::string> names{"walker-core", "observables",
                                              "analytic", "kspace"};
  return names;
}

namespace detail {

struct Outcome {
  bool passed;
  std::string detail;
};

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

inline Outcome below(double value, double limit) {
  return {value < limit, "max deviation " + fmt(value) + " (limit " + fmt(limit) + ")"};
}

inline WalkerDensityMatrix run(const BlochVector& r, const NoiseModel& noise,
                               int steps, int r_shift = kRShift) {
  WalkerDensityMatrix rho = init_state(r, steps);
  for (int i = 0; i < steps; ++i) apply_step_with_shift(rho, noise, r_shift);
  return rho;
}

inline const BlochVector kStateR{0.5, 0.0, 0.0, 0.5};
inline const BlochVector kStateSymmetric{0.5, 0.0, 0.5, 0.0};

struct Check {
  std::string module;
  std::string name;
  std::function<Outcome(const Options&)> fn;
};

inline std::vector<Check> all_checks() {
  std::vector<Check> checks;
  auto add = [&](std::string module, std::string name,
                 std::function<Outcome(const Options&)> fn) {
    checks.push_back({std::move(module), std::move(name), std::move(fn)});
  };

  // walker-core
  add("walker-core", "kraus completeness", [](const Options& o) {
    double worst = 0.0;
    for (const auto& n : {NoiseModel::coherent(), NoiseModel::tunneling(0.3),
                          NoiseModel::coin_measurement(0.7)}) {
      worst = std::max(worst,
                       kraus_completeness_check(n, 3, o.r_shift).max_deviation);
    }
    return below(worst, tol::kAlgebraic);
  });
  add("walker-core", "structural step matches dense kraus sum",
      [](const Options& o) {
        double worst = 0.0;
        for (const auto& n : {NoiseModel::tunneling(0.4),
                              NoiseModel::coin_measurement(0.6)}) {
          WalkerDensityMatrix fast = init_state(kStateSymmetric, 4);
          WalkerDensityMatrix slow = fast;
          const auto ops = kraus_operators(n, fast.window(), o.r_shift);
          for (int i = 0; i < 2; ++i) {
            apply_step_with_shift(fast, n, o.r_shift);
            slow = apply_channel_dense(slow, ops);
          }
          worst = std::max(
              worst, (fast.matrix() - slow.matrix()).cwiseAbs().maxCoeff());
        }
        return below(worst, tol::kAlgebraic);
      });
  add("walker-core", "trace, hermiticity and positivity preserved",
      [](const Options& o) {
        bool ok = true;
        std::string detail;
        for (const auto& n : {NoiseModel::tunneling(0.3),
                              NoiseModel::coin_measurement(0.5)}) {
          const auto d = diagnose(run(kStateR, n, 25, o.r_shift));
          ok = ok && d.ok();
          detail += to_string(n.kind()) + ": trace " + fmt(d.trace_error) +
                    ", herm " + fmt(d.hermiticity_error) + ", min eig " +
                    fmt(d.min_eigenvalue) + "; ";
        }
        return Outcome{ok, detail};
      });
  add("walker-core", "drift sign for |R> is positive", [](const Options& o) {
    const auto m =
        moments(distribution(run(kStateR, NoiseModel::coherent(), 50, o.r_shift)));
    return Outcome{m.mean > 0.0, "<x>(50) = " + fmt(m.mean)};
  });

  // observables
  add("observables", "negativity of a Bell-like state is 1/2",
      [](const Options&) {
        PositionWindow w(1);
        CVector psi = CVector::Zero(w.dim());
        psi(w.state_index(0, Coin::R)) = 1.0 / std::numbers::sqrt2;
        psi(w.state_index(1, Coin::L)) = 1.0 / std::numbers::sqrt2;
        const WalkerDensityMatrix rho(w, psi * psi.adjoint());
        return below(std::abs(negativity(rho) - 0.5), 1e-10);
      });
  add("observables", "coin and position partial transposes agree",
      [](const Options&) {
        const auto rho = run(kStateR, NoiseModel::tunneling(0.5), 12);
        return below(std::abs(negativity(rho) -
                              negativity_position_transpose(rho)),
                     1e-9);
      });
  add("observables", "purity of coherent walk stays 1", [](const Options&) {
    return below(std::abs(purity(run(kStateR, NoiseModel::coherent(), 20)) - 1.0),
                 tol::kDrift);
  });

  // analytic
  add("analytic", "convolution equals simulation", [](const Options&) {
    double worst = 0.0;
    const int t = 15;
    const Distribution p0 = analytic::coherent_reference(kStateR, t);
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const Distribution sim =
          distribution(run(kStateR, NoiseModel::tunneling(p), t), t);
      const Distribution formula = analytic::decoherent_distribution(p0, p);
      for (int x = -2 * t; x <= 2 * t; ++x) {
        worst = std::max(worst, std::abs(sim.at(x) - formula.at(x)));
      }
    }
    return below(worst, tol::kDrift);
  });
  add("analytic", "variance closed form at t = 100", [](const Options&) {
    const int t = 100;
    const Distribution p0 = analytic::coherent_reference(PureCoinState{}, t);
    double worst = 0.0;
    for (double p : {0.0, 0.5}) {
      const double v =
          moments(analytic::decoherent_distribution(p0, p)).variance;
      worst = std::max(worst,
                       std::abs(v - analytic::analytic_variance(kStateR, p, t)) / v);
    }
    return below(worst, 0.01);
  });
  add("analytic", "variance shift equals p t", [](const Options&) {
    const int t = 30;
    const double v0 = moments(distribution(run(kStateR, NoiseModel::coherent(), t))).variance;
    const double v1 = moments(distribution(run(kStateR, NoiseModel::tunneling(0.6), t))).variance;
    return below(std::abs(v1 - v0 - 0.6 * t), 1e-9);
  });
  add("analytic", "A coefficient bounds", [](const Options&) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    const double a = analytic::kAlpha;
    double worst = 0.0;
    for (int i = 0; i < 10000; ++i) {
      BlochVector r{0.5, u(rng), u(rng), u(rng)};
      if (r.norm_squared() > 0.25) continue;
      const double coef = analytic::variance_coefficients(r, 0.0).A;
      worst = std::max({worst, coef - a, (a - 3 * a * a) - coef});
    }
    return Outcome{worst <= tol::kAlgebraic, "max bound violation " + fmt(worst)};
  });

  // kspace
  add("kspace", "coin kraus completeness and explicit form", [](const Options&) {
    double worst = 0.0;
    for (double k : {0.0, 1.0, -2.0, 1.234}) {
      for (double p : {0.0, 0.3, 1.0}) {
        const auto c = kspace::coin_kraus_k(p, k);
        const auto e = kspace::coin_kraus_k_explicit(p, k);
        kspace::Matrix2 sum = kspace::Matrix2::Zero();
        for (std::size_t n = 0; n < 3; ++n) {
          sum += c[n].adjoint() * c[n];
          worst = std::max(worst, (c[n] - e[n]).cwiseAbs().maxCoeff());
        }
        worst = std::max(worst, (sum - kspace::Matrix2::Identity()).cwiseAbs().maxCoeff());
      }
    }
    return below(worst, 1e-14);
  });
  add("kspace", "L closed form, p cancellation, trace row", [](const Options&) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uk(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double k = uk(rng);
      const double p = 0.5 * (u(rng) + 1.0);
      const kspace::AffineVector v(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                                   cplx(u(rng), u(rng)), cplx(u(rng), u(rng)));
      const kspace::Superop4 l = kspace::build_L(k);
      worst = std::max(worst, (l * v - kspace::apply_L_direct(k, p, v)).cwiseAbs().maxCoeff());
      kspace::Superop4 power = kspace::Superop4::Identity();
      for (int m = 1; m <= 20; ++m) {
        power = l * power;
        const Eigen::RowVector4cd row = power.row(0);
        worst = std::max(worst, (row - Eigen::RowVector4cd(1, 0, 0, 0)).cwiseAbs().maxCoeff());
      }
    }
    return below(worst, 1e-10);
  });
  add("kspace", "L spectrum", [](const Options&) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> uk(-std::numbers::pi, std::numbers::pi);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
      const double k = uk(rng);
      if (std::abs(std::remainder(k, std::numbers::pi)) < 1e-3) continue;
      worst = std::max(worst, kspace::L_spectrum(k).max_mismatch);
    }
    return below(worst, 1e-10);
  });
  add("kspace", "G and J finite differences, q identity", [](const Options&) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> uk(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double fd = 0.0;
    double qid = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double k = uk(rng);
      const double p = 0.5 * (u(rng) + 1.0);
      fd = std::max(fd, (kspace::build_G_numeric(k, p) - kspace::build_G(k)).cwiseAbs().maxCoeff());
      fd = std::max(fd, (kspace::build_J_numeric(k, p) - kspace::build_J(k, p)).cwiseAbs().maxCoeff());
      const kspace::AffineVector v(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)),
                                   cplx(u(rng), u(rng)), cplx(u(rng), u(rng)));
      qid = std::max(qid, (kspace::build_J(k, p) * v - kspace::apply_J_via_walk(k, p, v)).cwiseAbs().maxCoeff());
    }
    return Outcome{fd < 1e-8 && qid < 1e-10,
                   "finite differences " + fmt(fd) + ", q identity " + fmt(qid)};
  });
  add("kspace", "gamma closed form stays within a bounded offset",
      [](const Options&) {
        double worst = 0.0;
        for (int t : {10, 50, 200}) {
          worst = std::max(worst, kspace::gamma_partial_sum(1.0, t).max_abs_diff);
        }
        return below(worst, 10.0);
      });
  add("kspace", "quadrature moments match simulation and closed forms",
      [](const Options&) {
        const int t = 20;
        const auto q = kspace::moment_crosscheck(kStateR, t, 0.3, 512);
        const auto m = moments(distribution(run(kStateR, NoiseModel::tunneling(0.3), t)));
        const double exact = std::max(std::abs(q.mean - m.mean),
                                      std::abs(q.second_moment - m.second_moment));
        const auto q50 = kspace::moment_crosscheck(kStateR, 50, 0.0);
        const double rel = std::abs(q50.mean - analytic::analytic_first_moment(kStateR, 50)) /
                           std::abs(q50.mean);
        return Outcome{exact < 1e-9 && rel < 0.01,
                       "vs simulation " + fmt(exact) + ", vs closed form " + fmt(rel)};
      });
  return checks;
}

}  // namespace detail

inline std::vector<CheckResult> run(const Options& options = {}) {
  std::vector<CheckResult> results;
  for (const auto& check : detail::all_checks()) {
    if (!options.only.empty() && check.module != options.only) continue;
    CheckResult r{check.module, check.name, false, ""};
    try {
      const auto outcome = check.fn(options);
      r.passed = outcome.passed;
      r.detail = outcome.detail;
    } catch (const std::exception& e) {
      r.detail = std::string("threw: ") + e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace qwalk::verify
