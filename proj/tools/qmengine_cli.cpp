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


// qmengine command-line tool: cycle, sweep, pulse-verify and mc experiments.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "qmengine/qmengine.hpp"
#include "run_config.hpp"

namespace {

using nlohmann::json;
using namespace qme;
using namespace qme::cli;

constexpr double kSoundnessFloor = 1.0 - 1e-9;

json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return snap(v);
}

json state_json(const QState& rho) {
  json rows = json::array();
  for (int i = 0; i < rho.dim(); ++i) {
    json row = json::array();
    for (int j = 0; j < rho.dim(); ++j) row.push_back({number(rho(i, j).real()), number(rho(i, j).imag())});
    rows.push_back(row);
  }
  return rows;
}

json report_json(const CycleReport& r) {
  return {{"p", number(r.p)},
          {"kBT_pev", number(r.kbt_pev)},
          {"backend", std::string(to_string(r.backend))},
          {"q_used", number(r.q_used)},
          {"heat_pev", number(r.heat_p)},
          {"work_pev", number(r.work_ext)},
          {"heat_cold_pev", number(r.heat_cold)},
          {"dSa_nats", number(r.dS_a)},
          {"dSb_nats", number(r.dS_b)},
          {"eta", number(r.efficiency)},
          {"power_pev_per_s", number(r.power_ext)},
          {"rho1", state_json(r.rho1)},
          {"rho2", state_json(r.rho2)},
          {"rho3", state_json(r.rho3)},
          {"flags", r.flags}};
}

json estimate_json(const EstimateWithError& e) {
  return {{"mean", number(e.mean)}, {"std", number(e.std)}, {"n", e.n}, {"discarded", e.discarded}};
}

/// Writes through a temporary file and a rename so readers never see a
/// partial output.
void write_output(const RunConfig& cfg, const std::string& text) {
  if (!cfg.out_path) {
    std::cout << text;
    return;
  }
  const std::filesystem::path target(*cfg.out_path);
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, fmt::format("cannot write '{}'", tmp.string()));
    out << text;
    if (!out.flush()) throw Error(ErrorCode::ConfigError, fmt::format("write to '{}' failed", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) throw Error(ErrorCode::ConfigError, fmt::format("cannot rename to '{}': {}", target.string(), ec.message()));
}

std::string run_cycle_experiment(const RunConfig& cfg, const json& echo) {
  const auto ps = cfg.effective_p_grid();
  const auto ts = cfg.effective_temps();
  if (ps.size() != 1 || ts.size() != 1) {
    throw Error(ErrorCode::ConfigError, "cycle takes exactly one p and one kBT; use sweep for grids");
  }
  CycleConfig cc = cfg.cycle_config();
  cc.p = ps.front();
  cc.kbt_pev = ts.front();
  const CycleReport r = run_cycle(cc);
  switch (cfg.effective_output()) {
    case OutputFormat::Json:
      return json{{"schema", "qmengine-cycle-json/1"}, {"config", echo}, {"report", report_json(r)}}.dump(2) + "\n";
    case OutputFormat::Csv:
      return sweep_csv({SweepRow{cc.p, cc.kbt_pev, cc.backend, r, {}, {}}}, echo.dump());
    case OutputFormat::Svg:
      return emit_plot({SweepRow{cc.p, cc.kbt_pev, cc.backend, r, {}, {}}}, cfg.plot, "config: " + echo.dump());
  }
  return {};
}

std::string run_sweep_experiment(const RunConfig& cfg, const json& echo) {
  const auto rows = sweep(cfg.effective_p_grid(), cfg.effective_temps(), cfg.cycle_config());
  switch (cfg.effective_output()) {
    case OutputFormat::Csv: return sweep_csv(rows, echo.dump());
    case OutputFormat::Svg: return emit_plot(rows, cfg.plot, "config: " + echo.dump());
    case OutputFormat::Json: {
      json out = {{"schema", "qmengine-sweep-json/1"}, {"config", echo}, {"rows", json::array()}};
      for (const auto& row : rows) {
        if (row.report) {
          out["rows"].push_back(report_json(*row.report));
        } else {
          out["rows"].push_back({{"p", number(row.p)},
                                 {"kBT_pev", number(row.kbt_pev)},
                                 {"error", row.error},
                                 {"message", row.error_message}});
        }
      }
      return out.dump(2) + "\n";
    }
  }
  return {};
}

struct VerifyResult {
  std::string text;
  bool sound = true;
};

VerifyResult run_pulse_verify(const RunConfig& cfg, const json& echo) {
  NoiseModel noisy = cfg.noise;
  noisy.enabled = true;
  const NoiseModel clean{};
  std::vector<PulseVerifyRow> rows;
  constexpr int kAngles = 20;
  for (char channel : {'a', 'b'}) {
    for (int k = 0; k < kAngles; ++k) {
      const double angle = std::numbers::pi * k / kAngles;
      const PulseSequence seq =
          channel == 'a' ? compile_channel_a(angle, cfg.pulse) : compile_channel_b(angle, cfg.pulse);
      const double strength = std::pow(std::sin(0.5 * angle), 2);
      const Matrix ideal = channel == 'a' ? choi_matrix(kraus_a(strength, 1.0)) : choi_matrix(kraus_b(strength));
      const double j = cfg.pulse.j_coupling_hz;
      rows.push_back({channel, angle, process_fidelity(effective_channel(seq, clean, j), ideal),
                      process_fidelity(effective_channel(seq, noisy, j), ideal), seq.size(), seq.total_duration()});
    }
  }
  VerifyResult out;
  for (const auto& r : rows) out.sound = out.sound && r.fidelity_noiseless >= kSoundnessFloor;
  if (cfg.effective_output() == OutputFormat::Json) {
    json j = {{"schema", "qmengine-pulse-verify-json/1"}, {"config", echo}, {"rows", json::array()}};
    for (const auto& r : rows) {
      j["rows"].push_back({{"channel", std::string(1, r.channel)},
                           {"theta", number(r.angle)},
                           {"choi_fidelity_noiseless", number(r.fidelity_noiseless)},
                           {"choi_fidelity_noisy", number(r.fidelity_noisy)},
                           {"ops", r.op_count},
                           {"duration_s", number(r.duration_s)}});
    }
    out.text = j.dump(2) + "\n";
  } else if (cfg.effective_output() == OutputFormat::Csv) {
    out.text = pulse_verify_csv(rows, echo.dump());
  } else {
    throw Error(ErrorCode::ConfigError, "pulse-verify writes csv or json");
  }
  return out;
}

std::string run_mc_experiment(const RunConfig& cfg, const json& echo) {
  std::vector<McRow> rows;
  for (double kbt : cfg.effective_temps()) {
    for (double p : cfg.effective_p_grid()) {
      McRow row{p, kbt, std::nullopt, {}};
      try {
        CycleConfig cc = cfg.cycle_config();
        cc.p = p;
        cc.kbt_pev = kbt;
        row.estimates = estimate_cycle(run_cycle(cc), cc.nu_khz, cc.tau_cycle_s, cfg.mc);
      } catch (const Error& e) {
        row.error = to_string(e.code());
      }
      rows.push_back(std::move(row));
    }
  }
  if (cfg.effective_output() == OutputFormat::Csv) return mc_csv(rows, echo.dump());
  if (cfg.effective_output() != OutputFormat::Json) throw Error(ErrorCode::ConfigError, "mc writes csv or json");
  json j = {{"schema", "qmengine-mc-json/1"}, {"config", echo}, {"rows", json::array()}};
  for (const auto& row : rows) {
    json r = {{"p", number(row.p)}, {"kBT_pev", number(row.kbt_pev)}};
    if (row.estimates) {
      const CycleEstimates& e = *row.estimates;
      r["heat_pev"] = estimate_json(e.heat_p);
      r["work_pev"] = estimate_json(e.work_ext);
      r["heat_cold_pev"] = estimate_json(e.heat_cold);
      r["dSa_nats"] = estimate_json(e.dS_a);
      r["dSb_nats"] = estimate_json(e.dS_b);
      r["eta"] = estimate_json(e.efficiency);
      r["power_pev_per_s"] = estimate_json(e.power_ext);
    } else {
      r["error"] = row.error;
    }
    j["rows"].push_back(r);
  }
  return j.dump(2) + "\n";
}

int fail(std::string_view code, const std::string& message, int status) {
  std::cerr << json{{"error", {{"code", code}, {"message", message}}}}.dump() << "\n";
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for a qubit heat engine driven by two generalized measurement channels"};
  app.require_subcommand(1);

  std::optional<std::string> config_path;
  Overrides ov;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--p", ov.p, "measurement strength: value, list a,b,c or range start:stop:step");
    sub->add_option("--kbt", ov.kbt, "spin temperatures k_B T in peV, comma separated");
    sub->add_option("--nu", ov.nu, "offset frequency in kHz");
    sub->add_option("--backend", ov.backend, "ideal | pulse");
    sub->add_option("--noise", ov.noise, "relaxation in the pulse backend: on | off");
    sub->add_option("--seed", ov.seed, "Monte Carlo seed (falls back to QME_SIM_SEED)");
    sub->add_option("--out", ov.out, "output file (default: stdout)");
    sub->add_option("--format", ov.format, "csv | json | svg");
    sub->add_option("--plot", ov.plot, "entropy-vs-p | heat-work-vs-p | eta-power-vs-p");
    sub->add_option("--samples", ov.samples, "Monte Carlo draws per point");
  };
  add_common(app.add_subcommand("cycle", "run a single engine cycle"));
  add_common(app.add_subcommand("sweep", "sweep p over one or more temperatures"));
  add_common(app.add_subcommand("pulse-verify", "check compiled pulse sequences against the ideal channels"));
  add_common(app.add_subcommand("mc", "Monte Carlo error bars for a sweep"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("UsageError", e.what(), 2);
  }

  try {
    RunConfig cfg;
    if (config_path) {
      std::ifstream in(*config_path);
      if (!in) throw Error(ErrorCode::ConfigError, fmt::format("cannot open config '{}'", *config_path));
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::ConfigError, fmt::format("config '{}': {}", *config_path, e.what()));
      }
      cfg = config_from_json(j);
    }
    cfg.experiment = experiment_from_string(app.get_subcommands().front()->get_name());
    apply_overrides(cfg, ov, std::getenv("QME_SIM_SEED"));
    const json echo = config_to_json(cfg);

    switch (cfg.experiment) {
      case Experiment::Cycle: write_output(cfg, run_cycle_experiment(cfg, echo)); break;
      case Experiment::Sweep: write_output(cfg, run_sweep_experiment(cfg, echo)); break;
      case Experiment::Mc: write_output(cfg, run_mc_experiment(cfg, echo)); break;
      case Experiment::PulseVerify: {
        const VerifyResult v = run_pulse_verify(cfg, echo);
        write_output(cfg, v.text);
        if (!v.sound) return fail("CompilerUnsound", "a noiseless Choi fidelity fell below 1 - 1e-9", 3);
        break;
      }
    }
  } catch (const Error& e) {
    const bool usage = e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::ParseError;
    return fail(to_string(e.code()), e.what(), usage ? 2 : 1);
  } catch (const std::exception& e) {
    return fail("InternalError", e.what(), 1);
  }
  return 0;
}
