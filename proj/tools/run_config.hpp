// Copyright 2026 The qmengine Authors
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

// Run configuration of the command-line tool: JSON file plus flag overrides.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "qmengine/qmengine.hpp"

namespace qme::cli {

using nlohmann::json;

enum class Experiment { Cycle, Sweep, PulseVerify, Mc };
enum class OutputFormat { Csv, Json, Svg };

inline std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Cycle: return "cycle";
    case Experiment::Sweep: return "sweep";
    case Experiment::PulseVerify: return "pulse-verify";
    case Experiment::Mc: return "mc";
  }
  return "";
}

inline std::string_view to_string(OutputFormat f) {
  switch (f) {
    case OutputFormat::Csv: return "csv";
    case OutputFormat::Json: return "json";
    case OutputFormat::Svg: return "svg";
  }
  return "";
}

inline Experiment experiment_from_string(std::string_view s) {
  if (s == "cycle") return Experiment::Cycle;
  if (s == "sweep") return Experiment::Sweep;
  if (s == "pulse-verify") return Experiment::PulseVerify;
  if (s == "mc") return Experiment::Mc;
  throw Error(ErrorCode::ConfigError, fmt::format("unknown experiment '{}'", s));
}

inline OutputFormat format_from_string(std::string_view s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  if (s == "svg") return OutputFormat::Svg;
  throw Error(ErrorCode::ConfigError, fmt::format("unknown output format '{}'", s));
}

inline Backend backend_from_string(std::string_view s) {
  if (s == "ideal" || s == "ideal-kraus") return Backend::IdealKraus;
  if (s == "pulse" || s == "pulse-sim") return Backend::PulseSim;
  throw Error(ErrorCode::ConfigError, fmt::format("unknown backend '{}'", s));
}

/// Rounds to 12 significant digits so grid points such as 0.6 or 1.0 come
/// out exactly as written.
inline double snap(double v) { return std::stod(fmt::format("{:.12g}", v)); }

/// "0.75", "0.5,0.6" or "start:stop:step" (inclusive).
inline std::vector<double> parse_grid(const std::string& spec) {
  auto number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, fmt::format("bad number '{}' in grid '{}'", s, spec));
    }
  };
  std::vector<double> out;
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t pos; (pos = spec.find(':', start)) != std::string::npos; start = pos + 1) {
      parts.push_back(spec.substr(start, pos - start));
    }
    parts.push_back(spec.substr(start));
    if (parts.size() != 3) throw Error(ErrorCode::ConfigError, "range must be start:stop:step");
    const double a = number(parts[0]), b = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || b < a) throw Error(ErrorCode::ConfigError, "range needs step > 0 and stop >= start");
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    for (long i = 0; i < n; ++i) out.push_back(snap(a + static_cast<double>(i) * step));
  } else {
    std::size_t start = 0;
    for (std::size_t pos; (pos = spec.find(',', start)) != std::string::npos; start = pos + 1) {
      out.push_back(number(spec.substr(start, pos - start)));
    }
    out.push_back(number(spec.substr(start)));
  }
  if (out.empty()) throw Error(ErrorCode::ConfigError, "empty grid");
  return out;
}

struct RunConfig {
  Experiment experiment = Experiment::Sweep;
  double nu_khz = presets::kNuKhz;
  std::optional<std::vector<double>> temps_pev;
  std::optional<std::vector<double>> p_grid;
  Backend backend = Backend::IdealKraus;
  double tau_cycle_s = 7.7e-3;
  NoiseModel noise = NoiseModel::sodium_formate();
  CompileOptions pulse{};
  NoiseSpec mc{};
  bool seed_set = false;
  std::optional<OutputFormat> output;
  std::optional<std::string> out_path;
  PlotKind plot = PlotKind::EtaPowerVsP;

  std::vector<double> effective_p_grid() const {
    if (p_grid) return *p_grid;
    if (experiment == Experiment::Cycle) return {0.75};
    return parse_grid("0.55:1.0:0.05");
  }

  std::vector<double> effective_temps() const {
    if (temps_pev) return *temps_pev;
    if (experiment == Experiment::Cycle) return {presets::kKbtHighPev};
    return {presets::kKbtPev.begin(), presets::kKbtPev.end()};
  }

  OutputFormat effective_output() const {
    if (output) return *output;
    return experiment == Experiment::Cycle ? OutputFormat::Json : OutputFormat::Csv;
  }

  CycleConfig cycle_config() const {
    CycleConfig c;
    c.nu_khz = nu_khz;
    c.tau_cycle_s = tau_cycle_s;
    c.backend = backend;
    c.noise = noise;
    c.pulse = pulse;
    return c;
  }
};

/// Flag values given on the command line; unset ones keep the file value.
struct Overrides {
  std::optional<std::string> p;
  std::optional<std::string> kbt;
  std::optional<double> nu;
  std::optional<std::string> backend;
  std::optional<std::string> noise;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::string> plot;
  std::optional<int> samples;
};

namespace detail {

inline void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::ConfigError, where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw Error(ErrorCode::ConfigError, fmt::format("unknown key '{}{}'", where, key));
  }
}

template <class T>
void read(const json& obj, const char* key, T& dst) {
  if (!obj.contains(key)) return;
  try {
    dst = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, fmt::format("key '{}': {}", key, e.what()));
  }
}

inline std::vector<double> read_grid(const json& v, const char* key) {
  if (v.is_string()) return parse_grid(v.get<std::string>());
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array()) {
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw Error(ErrorCode::ConfigError, fmt::format("'{}' must contain numbers", key));
      out.push_back(x.get<double>());
    }
    if (out.empty()) throw Error(ErrorCode::ConfigError, fmt::format("'{}' is empty", key));
    return out;
  }
  throw Error(ErrorCode::ConfigError, fmt::format("'{}' must be a number, list or range string", key));
}

}  // namespace detail

inline RunConfig config_from_json(const json& j) {
  detail::reject_unknown(j,
                         {"experiment", "nu_khz", "temps_pev", "p_grid", "backend", "tau_cycle_s", "noise", "pulse",
                          "mc", "output", "out_path", "plot"},
                         "");
  RunConfig c;
  if (j.contains("experiment")) c.experiment = experiment_from_string(j.at("experiment").get<std::string>());
  detail::read(j, "nu_khz", c.nu_khz);
  if (j.contains("temps_pev")) c.temps_pev = detail::read_grid(j.at("temps_pev"), "temps_pev");
  if (j.contains("p_grid")) c.p_grid = detail::read_grid(j.at("p_grid"), "p_grid");
  if (j.contains("backend")) c.backend = backend_from_string(j.at("backend").get<std::string>());
  detail::read(j, "tau_cycle_s", c.tau_cycle_s);
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    detail::reject_unknown(n, {"enabled", "t1_h", "t1_c", "t2_h", "t2_c", "eq_excited_h", "eq_excited_c"}, "noise.");
    detail::read(n, "enabled", c.noise.enabled);
    detail::read(n, "t1_h", c.noise.t1_h);
    detail::read(n, "t1_c", c.noise.t1_c);
    detail::read(n, "t2_h", c.noise.t2_h);
    detail::read(n, "t2_c", c.noise.t2_c);
    detail::read(n, "eq_excited_h", c.noise.eq_excited_h);
    detail::read(n, "eq_excited_c", c.noise.eq_excited_c);
  }
  if (j.contains("pulse")) {
    const json& p = j.at("pulse");
    detail::reject_unknown(p, {"j_coupling_hz", "nutation_rate_hz", "target_duration_s", "simplify"}, "pulse.");
    detail::read(p, "j_coupling_hz", c.pulse.j_coupling_hz);
    detail::read(p, "nutation_rate_hz", c.pulse.nutation_rate_hz);
    detail::read(p, "target_duration_s", c.pulse.target_duration_s);
    detail::read(p, "simplify", c.pulse.simplify);
  }
  if (j.contains("mc")) {
    const json& m = j.at("mc");
    detail::reject_unknown(m, {"sigma_mag", "sigma_qst", "n_samples", "seed"}, "mc.");
    detail::read(m, "sigma_mag", c.mc.sigma_mag);
    detail::read(m, "sigma_qst", c.mc.sigma_qst);
    detail::read(m, "n_samples", c.mc.n_samples);
    if (m.contains("seed")) {
      detail::read(m, "seed", c.mc.seed);
      c.seed_set = true;
    }
  }
  if (j.contains("output")) c.output = format_from_string(j.at("output").get<std::string>());
  if (j.contains("out_path")) c.out_path = j.at("out_path").get<std::string>();
  if (j.contains("plot")) c.plot = plot_kind_from_string(j.at("plot").get<std::string>());
  return c;
}

inline void apply_overrides(RunConfig& c, const Overrides& o, const char* env_seed) {
  if (o.p) c.p_grid = parse_grid(*o.p);
  if (o.kbt) c.temps_pev = parse_grid(*o.kbt);
  if (o.nu) c.nu_khz = *o.nu;
  if (o.backend) c.backend = backend_from_string(*o.backend);
  if (o.noise) {
    if (*o.noise == "on") c.noise.enabled = true;
    else if (*o.noise == "off") c.noise.enabled = false;
    else throw Error(ErrorCode::ConfigError, "--noise takes on|off");
  }
  if (o.out) c.out_path = *o.out;
  if (o.format) c.output = format_from_string(*o.format);
  if (o.plot) c.plot = plot_kind_from_string(*o.plot);
  if (o.samples) c.mc.n_samples = *o.samples;
  if (o.seed) {
    c.mc.seed = *o.seed;
    c.seed_set = true;
  } else if (!c.seed_set && env_seed != nullptr && *env_seed != '\0') {
    try {
      c.mc.seed = std::stoull(env_seed);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, fmt::format("QME_SIM_SEED='{}' is not an unsigned integer", env_seed));
    }
    c.seed_set = true;
  }
}

/// Effective configuration, echoed into every output. The output path is
/// left out so that the same run written elsewhere produces the same bytes.
inline json config_to_json(const RunConfig& c) {
  json j;
  j["experiment"] = std::string(to_string(c.experiment));
  j["nu_khz"] = c.nu_khz;
  j["temps_pev"] = c.effective_temps();
  j["p_grid"] = c.effective_p_grid();
  j["backend"] = std::string(to_string(c.backend));
  j["tau_cycle_s"] = c.tau_cycle_s;
  j["noise"] = {{"enabled", c.noise.enabled}, {"t1_h", c.noise.t1_h},           {"t1_c", c.noise.t1_c},
                {"t2_h", c.noise.t2_h},       {"t2_c", c.noise.t2_c},           {"eq_excited_h", c.noise.eq_excited_h},
                {"eq_excited_c", c.noise.eq_excited_c}};
  j["pulse"] = {{"j_coupling_hz", c.pulse.j_coupling_hz},
                {"nutation_rate_hz", c.pulse.nutation_rate_hz},
                {"target_duration_s", c.pulse.target_duration_s},
                {"simplify", c.pulse.simplify}};
  j["mc"] = {{"sigma_mag", c.mc.sigma_mag},
             {"sigma_qst", c.mc.sigma_qst},
             {"n_samples", c.mc.n_samples},
             {"seed", c.mc.seed}};
  j["output"] = std::string(to_string(c.effective_output()));
  if (c.experiment == Experiment::Sweep) j["plot"] = std::string(to_string(c.plot));
  return j;
}

}  // namespace qme::cli
