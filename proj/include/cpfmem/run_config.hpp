// Copyright 2026 The cpfmem Authors
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

// Declarative run configuration (JSON). Every validation error names the
// offending field.

#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpfmem/bath_kernel.hpp"
#include "cpfmem/cpf_analytic.hpp"
#include "cpfmem/dynamics.hpp"
#include "cpfmem/errors.hpp"
#include "cpfmem/experiment_sim.hpp"
#include "cpfmem/initial_state.hpp"

namespace cpfmem {

struct BathSpec {
  std::optional<Lorentzian> lorentzian;
  std::filesystem::path kernel_file;  // resolved against the config directory
  double gamma = 1.0;                 // decay scale used to express times as gamma * t

  BathKernel make_kernel() const {
    if (lorentzian) return BathKernel::lorentzian(lorentzian->gamma, lorentzian->tau_c);
    return load_kernel_csv(kernel_file.string());
  }

  // gamma * tau_c, or NaN for tabulated kernels.
  double gamma_tau_c() const {
    if (lorentzian) return lorentzian->gamma * lorentzian->tau_c;
    return std::numeric_limits<double>::quiet_NaN();
  }
};

struct NoiseSpec {
  std::vector<double> total_counts{10000.0};
  std::vector<double> visibility{1.0};
  std::size_t replicas = 200;
  std::uint64_t seed = 0;
  CountBudget budget = CountBudget::per_sweep;

  ExperimentConfig experiment(double counts, double v) const {
    ExperimentConfig cfg;
    cfg.total_counts = counts;
    cfg.visibility = v;
    cfg.replicas = replicas;
    cfg.seed = seed;
    cfg.budget = budget;
    cfg.validate();
    return cfg;
  }
};

struct RunConfig {
  std::optional<BathSpec> bath;
  std::optional<InitialState> state;
  std::vector<MeasurementScheme> schemes{MeasurementScheme::zzz, MeasurementScheme::xzx};
  Outcome y = Outcome::minus;
  TimeGrid grid;                 // t_max in units of 1/gamma
  bool absolute_units = false;   // report t instead of gamma * t
  std::optional<PropagatorMethod> method;
  double fine_step = 0.0;        // solver step in units of 1/gamma, 0 = automatic
  std::optional<NoiseSpec> noise;
  std::filesystem::path output{"."};
  nlohmann::json echo;           // normalized document for output headers

  const BathSpec& require_bath() const {
    if (!bath) throw ValidationError("config: field 'bath' is required for this command");
    return *bath;
  }

  const InitialState& require_state() const {
    if (!state) throw ValidationError("config: field 'state' is required for this command");
    return *state;
  }

  const NoiseSpec& require_noise() const {
    if (!noise) throw ValidationError("config: field 'noise' is required for this command");
    return *noise;
  }

  // Dynamics in the kernel's own time unit; the default method is the
  // closed form for Lorentzian kernels and Volterra otherwise.
  Dynamics make_dynamics() const {
    const auto& b = require_bath();
    auto kernel = b.make_kernel();
    const auto m = method.value_or(b.lorentzian ? PropagatorMethod::closed_form
                                                : PropagatorMethod::volterra);
    return Dynamics(std::move(kernel), m, fine_step / b.gamma);
  }

  // Output grid converted from gamma * t to the kernel's time unit.
  TimeGrid physical_grid() const {
    TimeGrid g = grid;
    if (bath) g.t_max /= bath->gamma;
    return g;
  }

  // Reported time for a physical time t.
  double report_time(double t) const {
    if (absolute_units || !bath) return t;
    return t * bath->gamma;
  }
};

namespace detail {

inline std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

inline void reject_unknown(const nlohmann::json& obj, const std::string& where,
                           std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ValidationError("config: unknown field '" + join_path(where, it.key()) + "'");
  }
}

inline const nlohmann::json& require_object(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ValidationError("config: field '" + where + "' must be an object");
  return j;
}

inline double number_field(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number()) throw ValidationError("config: field '" + where + "' must be a number");
  return j.get<double>();
}

inline double positive_field(const nlohmann::json& j, const std::string& where) {
  const double v = number_field(j, where);
  if (!(v > 0.0) || !std::isfinite(v))
    throw ValidationError("config: field '" + where + "' must be a finite number > 0");
  return v;
}

inline std::uint64_t unsigned_field(const nlohmann::json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    throw ValidationError("config: field '" + where + "' must be a non-negative integer");
  return j.get<std::uint64_t>();
}

inline std::string string_field(const nlohmann::json& j, const std::string& where) {
  if (!j.is_string()) throw ValidationError("config: field '" + where + "' must be a string");
  return j.get<std::string>();
}

inline std::vector<double> number_list(const nlohmann::json& j, const std::string& where) {
  std::vector<double> out;
  if (j.is_array()) {
    if (j.empty()) throw ValidationError("config: field '" + where + "' must not be empty");
    for (std::size_t i = 0; i < j.size(); ++i)
      out.push_back(number_field(j[i], where + "[" + std::to_string(i) + "]"));
  } else {
    out.push_back(number_field(j, where));
  }
  return out;
}

inline std::complex<double> complex_field(const nlohmann::json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ValidationError("config: field '" + where + "' must be a number or [re, im]");
}

inline BathSpec parse_bath(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  require_object(j, "bath");
  reject_unknown(j, "bath", {"gamma", "tau_c", "kernel_file", "time_units"});
  const bool has_lorentz = j.contains("tau_c");
  const bool has_file = j.contains("kernel_file");
  if (has_lorentz == has_file)
    throw ValidationError(
        "config: field 'bath' needs exactly one of 'tau_c' (with 'gamma') or 'kernel_file'");
  BathSpec b;
  if (has_lorentz) {
    if (!j.contains("gamma")) throw ValidationError("config: field 'bath.gamma' is required");
    if (j.contains("time_units"))
      throw ValidationError("config: field 'bath.time_units' only applies to 'kernel_file'");
    b.gamma = positive_field(j["gamma"], "bath.gamma");
    b.lorentzian = Lorentzian{b.gamma, positive_field(j["tau_c"], "bath.tau_c")};
    return b;
  }
  std::filesystem::path file = string_field(j["kernel_file"], "bath.kernel_file");
  if (file.is_relative()) file = base_dir / file;
  if (!std::filesystem::exists(file))
    throw ValidationError("config: field 'bath.kernel_file' refers to missing file '" +
                          file.string() + "'");
  b.kernel_file = file;
  const std::string units =
      j.contains("time_units") ? string_field(j["time_units"], "bath.time_units") : "gamma";
  if (units == "gamma") {
    if (j.contains("gamma"))
      throw ValidationError("config: field 'bath.gamma' is implied (= 1) when time_units is 'gamma'");
  } else if (units == "seconds") {
    if (!j.contains("gamma"))
      throw ValidationError("config: field 'bath.gamma' is required when time_units is 'seconds'");
    b.gamma = positive_field(j["gamma"], "bath.gamma");
  } else {
    throw ValidationError("config: field 'bath.time_units' must be 'gamma' or 'seconds'");
  }
  return b;
}

inline InitialState parse_state(const nlohmann::json& j) {
  require_object(j, "state");
  reject_unknown(j, "state", {"p", "a", "b"});
  const bool has_p = j.contains("p");
  const bool has_ab = j.contains("a") || j.contains("b");
  if (has_p == has_ab)
    throw ValidationError("config: field 'state' needs exactly one of 'p' or the pair 'a', 'b'");
  try {
    if (has_p) return InitialState::from_p(number_field(j["p"], "state.p"));
    if (!j.contains("a") || !j.contains("b"))
      throw ValidationError("config: field 'state' needs both 'a' and 'b'");
    return InitialState(complex_field(j["a"], "state.a"), complex_field(j["b"], "state.b"));
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.rfind("config:", 0) == 0) throw;
    throw ValidationError("config: field 'state': " + msg);
  }
}

inline NoiseSpec parse_noise(const nlohmann::json& j) {
  require_object(j, "noise");
  reject_unknown(j, "noise", {"total_counts", "visibility", "replicas", "seed", "budget"});
  NoiseSpec n;
  if (j.contains("total_counts")) {
    n.total_counts = number_list(j["total_counts"], "noise.total_counts");
    for (double c : n.total_counts)
      if (!(c > 0.0) || !std::isfinite(c))
        throw ValidationError("config: field 'noise.total_counts' entries must be > 0");
  }
  if (j.contains("visibility")) {
    n.visibility = number_list(j["visibility"], "noise.visibility");
    for (double v : n.visibility)
      if (!(v >= 0.0 && v <= 1.0))
        throw ValidationError("config: field 'noise.visibility' entries must lie in [0, 1]");
  }
  if (j.contains("replicas")) {
    n.replicas = unsigned_field(j["replicas"], "noise.replicas");
    if (n.replicas < 1) throw ValidationError("config: field 'noise.replicas' must be >= 1");
  }
  if (j.contains("seed")) n.seed = unsigned_field(j["seed"], "noise.seed");
  if (j.contains("budget")) {
    const auto b = string_field(j["budget"], "noise.budget");
    if (b == "per_sweep") {
      n.budget = CountBudget::per_sweep;
    } else if (b == "per_point") {
      n.budget = CountBudget::per_point;
    } else {
      throw ValidationError("config: field 'noise.budget' must be 'per_sweep' or 'per_point'");
    }
  }
  return n;
}

}  // namespace detail

// base_dir resolves relative file references.
inline RunConfig parse_run_config(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = ".") {
  using namespace detail;
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");
  reject_unknown(doc, "", {"bath", "state", "schemes", "y", "grid", "units", "propagator",
                           "fine_step", "noise", "output"});
  RunConfig cfg;
  if (doc.contains("bath")) cfg.bath = parse_bath(doc["bath"], base_dir);
  if (doc.contains("state")) cfg.state = parse_state(doc["state"]);
  if (doc.contains("schemes")) {
    const auto& s = doc["schemes"];
    if (!s.is_array() || s.empty())
      throw ValidationError("config: field 'schemes' must be a non-empty array");
    cfg.schemes.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto where = "schemes[" + std::to_string(i) + "]";
      try {
        cfg.schemes.push_back(scheme_from_string(string_field(s[i], where)));
      } catch (const ValidationError&) {
        throw ValidationError("config: field '" + where + "' must be one of zzz, xzx, yzy");
      }
    }
  }
  if (doc.contains("y")) {
    const auto& y = doc["y"];
    if (!y.is_number_integer() || (y.get<int>() != 1 && y.get<int>() != -1))
      throw ValidationError("config: field 'y' must be +1 or -1");
    cfg.y = outcome_from_int(y.get<int>());
  }
  if (doc.contains("grid")) {
    const auto& g = require_object(doc["grid"], "grid");
    reject_unknown(g, "grid", {"t_max", "steps", "equal_times"});
    if (g.contains("t_max")) cfg.grid.t_max = positive_field(g["t_max"], "grid.t_max");
    if (g.contains("steps")) {
      cfg.grid.steps = unsigned_field(g["steps"], "grid.steps");
      if (cfg.grid.steps < 1)
        throw ValidationError("config: field 'grid.steps' must be >= 1 (grid needs >= 2 points)");
    }
    if (g.contains("equal_times")) {
      if (!g["equal_times"].is_boolean())
        throw ValidationError("config: field 'grid.equal_times' must be a boolean");
      cfg.grid.equal_times = g["equal_times"].get<bool>();
    }
  }
  if (doc.contains("units")) {
    const auto u = string_field(doc["units"], "units");
    if (u != "gamma" && u != "absolute")
      throw ValidationError("config: field 'units' must be 'gamma' or 'absolute'");
    cfg.absolute_units = u == "absolute";
  }
  if (doc.contains("propagator")) {
    const auto m = string_field(doc["propagator"], "propagator");
    if (m == "closed_form") {
      cfg.method = PropagatorMethod::closed_form;
    } else if (m == "volterra") {
      cfg.method = PropagatorMethod::volterra;
    } else {
      throw ValidationError("config: field 'propagator' must be 'closed_form' or 'volterra'");
    }
    if (cfg.method == PropagatorMethod::closed_form && cfg.bath && !cfg.bath->lorentzian)
      throw ValidationError("config: field 'propagator' 'closed_form' requires a Lorentzian bath");
  }
  if (doc.contains("fine_step")) {
    cfg.fine_step = number_field(doc["fine_step"], "fine_step");
    if (cfg.fine_step < 0.0) throw ValidationError("config: field 'fine_step' must be >= 0");
  }
  if (doc.contains("noise")) cfg.noise = parse_noise(doc["noise"]);
  if (doc.contains("output")) cfg.output = string_field(doc["output"], "output");
  cfg.echo = doc;
  return cfg;
}

inline RunConfig parse_run_config_text(std::string_view text,
                                  const std::filesystem::path& base_dir = ".") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  return parse_run_config(doc, base_dir);
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config: cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config_text(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

// Replaces the noise seed in both the parsed config and its echo. Configs
// without a noise block are left alone.
inline void override_seed(RunConfig& cfg, std::uint64_t seed) {
  if (!cfg.noise) return;
  cfg.noise->seed = seed;
  cfg.echo["noise"]["seed"] = seed;
}

}  // namespace cpfmem
