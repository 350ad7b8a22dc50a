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

// Command-line front end: simulate | negativity | distribution | smoothness |
// verify. Everything lives here so tests can drive the CLI in-process; the
// executable in tools/ only forwards argv.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qwalk/analytic.hpp"
#include "qwalk/error.hpp"
#include "qwalk/observables.hpp"
#include "qwalk/verify.hpp"
#include "qwalk/walker.hpp"

#ifndef QWALK_VERSION
#define QWALK_VERSION "0.0.0"
#endif

namespace qwalk::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 1,
  kVerificationFailure = 2,
  kNumericalViolation = 3,
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Largest simulate/formula disagreement tolerated by `distribution`.
inline constexpr double kMethodAgreement = 1e-8;

struct RunConfig {
  std::string command;
  std::optional<int> steps;
  std::string noise = "none";  // none | tunneling | coin
  double p = 0.0;
  std::optional<std::string> p_grid;  // a:b:step
  std::optional<double> theta;
  std::optional<double> phi;
  std::optional<std::vector<double>> bloch;  // r1, r2, r3
  std::string method = "both";
  std::string out = ".";
  std::string format = "csv";
  std::string only;

  int steps_or(int fallback) const { return steps.value_or(fallback); }
};

inline constexpr int kDefaultSteps = 100;
inline constexpr int kDefaultNegativitySteps = 30;

// --- parsing -----------------------------------------------------------------

inline std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("--p-grid: cannot parse '" + item + "' in '" + text + "'");
    }
  }
  if (parts.size() != 3) {
    throw UsageError("--p-grid expects start:stop:step, got '" + text + "'");
  }
  const double a = parts[0], b = parts[1], step = parts[2];
  if (!(step > 0.0) || b < a) {
    throw UsageError("--p-grid needs step > 0 and stop >= start");
  }
  std::vector<double> values;
  const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    // Snap to 12 decimals so 0:1:0.1 yields 0.3 rather than 0.30000000000000004.
    values.push_back(std::round((a + i * step) * 1e12) / 1e12);
  }
  for (double v : values) {
    if (v < 0.0 || v > 1.0) {
      throw UsageError("--p-grid values must lie in [0, 1]");
    }
  }
  return values;
}

inline void merge_json_config(const std::string& path, RunConfig& cfg,
                              const CLI::App& app) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw UsageError("--config: invalid JSON in '" + path + "': " + e.what());
  }
  if (!j.is_object()) throw UsageError("--config: top level must be an object");
  auto given = [&](const char* flag) { return app.count(flag) > 0; };
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "steps") {
        if (!given("--steps")) cfg.steps = value.get<int>();
      } else if (key == "noise") {
        if (!given("--noise")) cfg.noise = value.get<std::string>();
      } else if (key == "p") {
        if (!given("--p")) cfg.p = value.get<double>();
      } else if (key == "p-grid" || key == "p_grid") {
        if (!given("--p-grid")) cfg.p_grid = value.get<std::string>();
      } else if (key == "theta") {
        if (!given("--theta")) cfg.theta = value.get<double>();
      } else if (key == "phi") {
        if (!given("--phi")) cfg.phi = value.get<double>();
      } else if (key == "bloch") {
        if (!given("--bloch")) cfg.bloch = value.get<std::vector<double>>();
      } else if (key == "method") {
        if (!given("--method")) cfg.method = value.get<std::string>();
      } else if (key == "out") {
        if (!given("--out")) cfg.out = value.get<std::string>();
      } else if (key == "format") {
        if (!given("--format")) cfg.format = value.get<std::string>();
      } else if (key == "only") {
        if (!given("--only")) cfg.only = value.get<std::string>();
      } else {
        throw UsageError("--config: unknown field '" + key + "'");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw UsageError("--config: wrong type for a field: " + std::string(e.what()));
  }
}

// --- resolved inputs ---------------------------------------------------------

inline BlochVector initial_state(const RunConfig& cfg) {
  if (cfg.bloch && (cfg.theta || cfg.phi)) {
    throw UsageError("--bloch cannot be combined with --theta/--phi");
  }
  if (cfg.bloch) {
    if (cfg.bloch->size() != 3) {
      throw UsageError("--bloch expects three values r1,r2,r3");
    }
    BlochVector r{0.5, (*cfg.bloch)[0], (*cfg.bloch)[1], (*cfg.bloch)[2]};
    try {
      r.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(std::string("--bloch: ") + e.what());
    }
    return r;
  }
  PureCoinState coin{cfg.theta.value_or(0.0), cfg.phi.value_or(0.0)};
  try {
    coin.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(coin.theta < 0.0 || coin.theta > std::numbers::pi
                                     ? "--theta: "
                                     : "--phi: ") +
                     e.what());
  }
  return coin.bloch();
}

inline NoiseModel noise_model(const std::string& kind, double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw UsageError("--p must lie in [0, 1], got " + std::to_string(p));
  }
  if (kind == "none") {
    if (p != 0.0) throw UsageError("--p requires --noise tunneling or coin");
    return NoiseModel::coherent();
  }
  if (kind == "tunneling") return NoiseModel::tunneling(p);
  if (kind == "coin") return NoiseModel::coin_measurement(p);
  throw UsageError("--noise must be one of none, tunneling, coin");
}

inline int checked_steps(const RunConfig& cfg, int fallback) {
  const int t = cfg.steps_or(fallback);
  if (t < 0) throw UsageError("--steps must be >= 0");
  return t;
}

// --- output ------------------------------------------------------------------

struct Table {
  std::string stem;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_label(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class OutputDir {
 public:
  OutputDir(const std::string& dir, std::string format)
      : dir_(dir), format_(std::move(format)) {
    if (format_ != "csv" && format_ != "json") {
      throw UsageError("--format must be csv or json");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw UsageError("--out: cannot create '" + dir + "': " + ec.message());
  }

  std::filesystem::path write(const Table& t) const {
    const auto path = dir_ / (t.stem + "." + format_);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("--out: cannot write " + path.string());
    if (format_ == "csv") {
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        os << (i ? "," : "") << t.columns[i];
      }
      os << '\n';
      for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
          os << (i ? "," : "") << format_number(row[i]);
        }
        os << '\n';
      }
    } else {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& row : t.rows) {
        nlohmann::ordered_json obj;
        for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = row[i];
        arr.push_back(std::move(obj));
      }
      os << arr.dump(1) << '\n';
    }
    return path;
  }

  void write_sidecar(const std::string& command, const nlohmann::ordered_json& body) const {
    const auto path = dir_ / (command + ".meta.json");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw UsageError("--out: cannot write " + path.string());
    os << body.dump(2) << '\n';
  }

 private:
  std::filesystem::path dir_;
  std::string format_;
};

inline nlohmann::ordered_json config_echo(const RunConfig& cfg, int steps,
                                          const BlochVector* r) {
  nlohmann::ordered_json j;
  j["tool"] = "qwalk";
  j["version"] = QWALK_VERSION;
  j["command"] = cfg.command;
  j["steps"] = steps;
  j["noise"] = cfg.noise;
  j["p"] = cfg.p;
  if (cfg.p_grid) j["p-grid"] = *cfg.p_grid;
  if (r) j["initial_bloch"] = {r->r1, r->r2, r->r3};
  j["method"] = cfg.method;
  j["format"] = cfg.format;
  return j;
}

// Runs fn(i) for i in [0, n) on a small worker pool; results stay in order.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(std::size_t n, Fn fn) {
  std::vector<Result> results(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads =
      std::min<std::size_t>(n, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

// --- commands ----------------------------------------------------------------

inline int cmd_simulate(const RunConfig& cfg, std::ostream& log) {
  const int steps = checked_steps(cfg, kDefaultSteps);
  const BlochVector r = initial_state(cfg);
  const NoiseModel noise = noise_model(cfg.noise, cfg.p);
  const OutputDir out(cfg.out, cfg.format);

  Table moments_table{"moments", {"t", "mean", "second_moment", "variance", "purity"}, {}};
  StepObserver record = [&](int t, const WalkerDensityMatrix& rho) {
    const MomentRecord m = moments(distribution(rho, t));
    moments_table.rows.push_back(
        {double(t), m.mean, m.second_moment, m.variance, purity(rho)});
  };
  const auto result = evolve(init_state(r, steps), noise, steps, {record});

  const Distribution d = distribution(result.state, steps);
  Table dist{"distribution", {"x", "probability"}, {}};
  for (int x = d.window().x_min(); x <= d.window().x_max(); ++x) {
    dist.rows.push_back({double(x), d.at(x)});
  }
  out.write(dist);
  out.write(moments_table);
  out.write_sidecar("simulate", config_echo(cfg, steps, &r));
  const auto& last = moments_table.rows.back();
  log << "simulate: t=" << steps << " mean=" << format_number(last[1])
      << " variance=" << format_number(last[3])
      << " purity=" << format_number(last[4]) << '\n';
  return kSuccess;
}

inline int cmd_negativity(const RunConfig& cfg, std::ostream& log) {
  const int steps = checked_steps(cfg, kDefaultNegativitySteps);
  const BlochVector r = initial_state(cfg);
  const auto grid = parse_grid(cfg.p_grid.value_or("0:1:0.1"));
  std::vector<std::string> kinds;
  if (cfg.noise == "none") {
    kinds = {"tunneling", "coin"};
  } else {
    noise_model(cfg.noise, 0.0);
    kinds = {cfg.noise};
  }
  const OutputDir out(cfg.out, cfg.format);

  struct Item {
    std::string kind;
    double p;
  };
  std::vector<Item> items;
  for (const auto& k : kinds) {
    for (double p : grid) items.push_back({k, p});
  }
  const auto curves = parallel_map<std::vector<double>>(items.size(), [&](std::size_t i) {
    std::vector<double> curve;
    StepObserver obs = [&](int, const WalkerDensityMatrix& rho) {
      curve.push_back(negativity(rho));
    };
    evolve(init_state(r, steps), noise_model(items[i].kind, items[i].p), steps, {obs});
    return curve;
  });

  Table vs_t{"negativity_vs_t", {"t"}, {}};
  for (const auto& it : items) vs_t.columns.push_back(it.kind + "_p=" + format_label(it.p));
  for (int t = 0; t <= steps; ++t) {
    std::vector<double> row{double(t)};
    for (const auto& c : curves) row.push_back(c[static_cast<std::size_t>(t)]);
    vs_t.rows.push_back(std::move(row));
  }
  Table vs_p{"negativity_vs_p", {"p"}, {}};
  for (const auto& k : kinds) vs_p.columns.push_back(k);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> row{grid[g]};
    for (std::size_t k = 0; k < kinds.size(); ++k) {
      row.push_back(curves[k * grid.size() + g].back());
    }
    vs_p.rows.push_back(std::move(row));
  }
  out.write(vs_t);
  out.write(vs_p);
  out.write_sidecar("negativity", config_echo(cfg, steps, &r));
  log << "negativity: " << items.size() << " curves to t=" << steps << '\n';
  return kSuccess;
}

inline int cmd_distribution(const RunConfig& cfg, std::ostream& log) {
  const int steps = checked_steps(cfg, kDefaultSteps);
  const BlochVector r = initial_state(cfg);
  const NoiseModel noise = noise_model(cfg.noise, cfg.p);
  const bool want_sim = cfg.method == "simulate" || cfg.method == "both";
  const bool want_formula = cfg.method == "formula" || cfg.method == "both";
  if (!want_sim && !want_formula) {
    throw UsageError("--method must be simulate, formula or both");
  }
  if (want_formula && noise.kind() == NoiseModel::Kind::coin_measurement) {
    throw UsageError("--method formula only covers --noise none or tunneling");
  }
  const OutputDir out(cfg.out, cfg.format);

  Table table{"distribution", {"x"}, {}};
  std::optional<Distribution> sim;
  std::optional<Distribution> formula;
  if (want_sim) {
    sim = distribution(evolve(init_state(r, steps), noise, steps).state, steps);
    table.columns.push_back("simulate");
  }
  if (want_formula) {
    formula = analytic::decoherent_distribution(
        analytic::coherent_reference(r, steps), noise.p());
    table.columns.push_back("formula");
  }
  double max_diff = 0.0;
  const PositionWindow w(steps);
  for (int x = w.x_min(); x <= w.x_max(); ++x) {
    std::vector<double> row{double(x)};
    if (sim) row.push_back(sim->at(x));
    if (formula) row.push_back(formula->at(x));
    if (sim && formula) max_diff = std::max(max_diff, std::abs(sim->at(x) - formula->at(x)));
    table.rows.push_back(std::move(row));
  }
  out.write(table);
  auto meta = config_echo(cfg, steps, &r);
  if (sim && formula) meta["max_abs_difference"] = max_diff;
  out.write_sidecar("distribution", meta);
  if (sim && formula) {
    log << "distribution: max |simulate - formula| = " << format_number(max_diff) << '\n';
    if (max_diff > kMethodAgreement) {
      std::cerr << "distribution: methods disagree beyond " << kMethodAgreement << '\n';
      return kNumericalViolation;
    }
  }
  return kSuccess;
}

inline int cmd_smoothness(const RunConfig& cfg, std::ostream& log) {
  const int steps = checked_steps(cfg, kDefaultSteps);
  const BlochVector r = initial_state(cfg);
  const auto grid = parse_grid(cfg.p_grid.value_or("0:1:0.01"));
  const OutputDir out(cfg.out, cfg.format);
  const Distribution p0 = analytic::coherent_reference(r, steps);
  const auto tv = parallel_map<double>(grid.size(), [&](std::size_t i) {
    return total_variation(analytic::decoherent_distribution(p0, grid[i]));
  });
  Table table{"smoothness", {"p", "total_variation"}, {}};
  for (std::size_t i = 0; i < grid.size(); ++i) table.rows.push_back({grid[i], tv[i]});
  out.write(table);
  out.write_sidecar("smoothness", config_echo(cfg, steps, &r));
  log << "smoothness: " << grid.size() << " points at t=" << steps << '\n';
  return kSuccess;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  const auto& names = verify::module_names();
  if (!cfg.only.empty() &&
      std::find(names.begin(), names.end(), cfg.only) == names.end()) {
    throw UsageError("--only must name one of walker-core, observables, analytic, kspace");
  }
  const auto results = verify::run({cfg.only, kRShift});
  bool all = true;
  for (const auto& r : results) {
    all = all && r.passed;
    char line[160];
    std::snprintf(line, sizeof line, "%-4s %-12s %-55s ", r.passed ? "PASS" : "FAIL",
                  r.module.c_str(), r.name.c_str());
    log << line << r.detail << '\n';
  }
  log << (all ? "all checks passed" : "verification FAILED") << " (" << results.size()
      << " checks)\n";
  return all ? kSuccess : kVerificationFailure;
}

// --- entry point -------------------------------------------------------------

inline int run(std::vector<std::string> args, std::ostream& log = std::cout) {
  CLI::App app{"Discrete-time quantum walk with tunneling and coin decoherence"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(QWALK_VERSION));

  RunConfig cfg;
  int steps = 0;
  std::vector<double> bloch;
  double theta = 0.0, phi = 0.0;
  std::string p_grid, config_path;

  for (const char* name : {"simulate", "negativity", "distribution", "smoothness", "verify"}) {
    auto* sub = app.add_subcommand(name);
    sub->fallthrough();
  }
  app.add_option("--steps", steps, "number of walk steps T");
  app.add_option("--noise", cfg.noise, "none | tunneling | coin");
  app.add_option("--p", cfg.p, "noise probability");
  app.add_option("--p-grid", p_grid, "noise grid start:stop:step");
  app.add_option("--theta", theta, "initial coin angle theta");
  app.add_option("--phi", phi, "initial coin phase phi");
  app.add_option("--bloch", bloch, "initial coin Bloch coordinates r1,r2,r3")->delimiter(',');
  app.add_option("--method", cfg.method, "simulate | formula | both");
  app.add_option("--out", cfg.out, "output directory");
  app.add_option("--format", cfg.format, "csv | json");
  app.add_option("--only", cfg.only, "verify a single module");
  app.add_option("--config", config_path, "JSON file with the same field names");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    log << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    log << QWALK_VERSION << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    std::cerr << "qwalk: " << e.what() << '\n';
    return kUsageError;
  }

  if (app.count("--steps")) cfg.steps = steps;
  if (app.count("--p-grid")) cfg.p_grid = p_grid;
  if (app.count("--theta")) cfg.theta = theta;
  if (app.count("--phi")) cfg.phi = phi;
  if (app.count("--bloch")) cfg.bloch = bloch;
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    if (!config_path.empty()) merge_json_config(config_path, cfg, app);
    if (cfg.command == "simulate") return cmd_simulate(cfg, log);
    if (cfg.command == "negativity") return cmd_negativity(cfg, log);
    if (cfg.command == "distribution") return cmd_distribution(cfg, log);
    if (cfg.command == "smoothness") return cmd_smoothness(cfg, log);
    return cmd_verify(cfg, log);
  } catch (const UsageError& e) {
    std::cerr << "qwalk: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "qwalk: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "qwalk: numerical invariant violated: " << e.what() << '\n';
    return kNumericalViolation;
  }
}

inline int run(int argc, char** argv, std::ostream& log = std::cout) {
  return run(std::vector<std::string>(argv + 1, argv + argc), log);
}

}  // namespace qwalk::cli
