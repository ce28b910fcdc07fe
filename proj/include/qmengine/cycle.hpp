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

// The three-stroke engine: Gibbs cooling, heating channel M^a and isentropic
// work-extraction channel M^b, with the full energy and entropy ledger.

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qmengine/channels.hpp"
#include "qmengine/pulsesim.hpp"
#include "qmengine/thermo.hpp"

namespace qme {

enum class Backend { IdealKraus, PulseSim };

inline std::string_view to_string(Backend b) { return b == Backend::IdealKraus ? "ideal" : "pulse"; }

struct CycleConfig {
  double nu_khz = presets::kNuKhz;
  double kbt_pev = presets::kKbtHighPev;
  double p = 0.75;
  double tau_cycle_s = 7.7e-3;
  Backend backend = Backend::IdealKraus;
  NoiseModel noise{};
  CompileOptions pulse{};
};

namespace flags {
inline constexpr std::string_view kNonEngine = "non-engine";
inline constexpr std::string_view kNoIsentropicQ = "q-unset";
inline constexpr std::string_view kEntropyNotIncreased = "entropy-not-increased";
inline constexpr std::string_view kEtaUndefined = "eta-undefined";
}  // namespace flags

struct CycleReport {
  double p = 0.0;
  double kbt_pev = 0.0;
  Backend backend = Backend::IdealKraus;
  QState rho1 = QState::maximally_mixed(2);
  QState rho2 = QState::maximally_mixed(2);
  QState rho3 = QState::maximally_mixed(2);
  double q_used = 0.0;
  double heat_p = 0.0;     // peV
  double work_ext = 0.0;   // peV
  double heat_cold = 0.0;  // peV
  double dS_a = 0.0;       // nats
  double dS_b = 0.0;       // nats
  double efficiency = std::numeric_limits<double>::quiet_NaN();
  double power_ext = 0.0;  // peV/s
  std::vector<std::string> flags;
};

/// <Q^p> = h nu p tanh(beta h nu / 2).
inline double heat_absorbed(double p, double nu_khz, double kbt_pev) {
  const SpinHamiltonianParams h{nu_khz};
  return h.h_nu() * p * thermal_polarization(h, ThermalParams{kbt_pev});
}

/// <W_ext> = h nu (2p - 1) tanh(beta h nu / 2).
inline double work_extracted(double p, double nu_khz, double kbt_pev) {
  const SpinHamiltonianParams h{nu_khz};
  return h.h_nu() * (2.0 * p - 1.0) * thermal_polarization(h, ThermalParams{kbt_pev});
}

struct Efficiency {
  double value = 0.0;
  bool engine = false;
};

/// eta = 2 - 1/p on (1/2, 1]; p = 1/2 returns 0 flagged as non-engine.
inline Efficiency efficiency(double p) {
  if (p == 0.5) return {0.0, false};
  if (p < 0.5) throw Error(ErrorCode::OutsideEngineRegime, "efficiency needs p > 1/2");
  if (p > 1.0) throw Error(ErrorCode::InvalidStrength, "p exceeds 1");
  return {2.0 - 1.0 / p, true};
}

inline double extracted_power(double work_ext, double tau_cycle_s) {
  if (!(tau_cycle_s > 0.0)) throw Error(ErrorCode::ConfigError, "tau_cycle must be positive");
  return work_ext / tau_cycle_s;
}

namespace cycle_detail {
inline QState reduce_system(const QState& joint) { return partial_trace(joint, kSystem); }
}  // namespace cycle_detail

inline CycleReport run_cycle(const CycleConfig& cfg) {
  detail::require_unit_interval(cfg.p, "p");
  if (!(cfg.tau_cycle_s > 0.0)) throw Error(ErrorCode::ConfigError, "tau_cycle must be positive");
  if (!(cfg.nu_khz > 0.0)) throw Error(ErrorCode::ConfigError, "nu must be positive");

  const SpinHamiltonianParams h{cfg.nu_khz};
  const ThermalParams t{cfg.kbt_pev};
  if (thermal_polarization(h, t) == 0.0) {
    throw Error(ErrorCode::DegenerateCycle, "infinite spin temperature: no polarisation to work with");
  }
  const double omega = omega_factor(h, t);

  CycleReport r;
  r.p = cfg.p;
  r.kbt_pev = cfg.kbt_pev;
  r.backend = cfg.backend;
  r.rho1 = gibbs_state(h, t);
  r.q_used = cfg.p >= 0.5 ? q_star(cfg.p, omega) : 0.0;

  if (cfg.backend == Backend::IdealKraus) {
    r.rho2 = apply(kraus_a(cfg.p, omega), r.rho1);
    r.rho3 = apply(kraus_b(r.q_used), r.rho2);
  } else {
    const QState joint = tensor_product(r.rho1, QState::basis(2, 0));
    const PulseSequence heat_seq = compile_channel_a(theta_of(cfg.p, omega), cfg.pulse);
    const PulseSequence full_seq = compile_composed(cfg.p, omega, r.q_used, cfg.pulse);
    r.rho2 = cycle_detail::reduce_system(simulate(heat_seq, joint, cfg.noise, cfg.pulse.j_coupling_hz));
    r.rho3 = cycle_detail::reduce_system(simulate(full_seq, joint, cfg.noise, cfg.pulse.j_coupling_hz));
  }

  const HermitianOp hc = h.hamiltonian();
  const double e1 = expectation(hc, r.rho1);
  const double e2 = expectation(hc, r.rho2);
  const double e3 = expectation(hc, r.rho3);
  r.heat_p = e2 - e1;
  r.work_ext = -(e3 - e2);
  r.heat_cold = r.work_ext - r.heat_p;
  r.dS_a = von_neumann_entropy(r.rho2) - von_neumann_entropy(r.rho1);
  r.dS_b = von_neumann_entropy(r.rho3) - von_neumann_entropy(r.rho2);
  r.power_ext = r.work_ext / cfg.tau_cycle_s;
  if (r.heat_p > 0.0) r.efficiency = r.work_ext / r.heat_p;

  if (cfg.p <= 0.5) r.flags.emplace_back(flags::kNonEngine);
  if (cfg.p < 0.5) r.flags.emplace_back(flags::kNoIsentropicQ);
  if (r.dS_a <= 1e-12) r.flags.emplace_back(flags::kEntropyNotIncreased);
  if (!(r.heat_p > 0.0)) r.flags.emplace_back(flags::kEtaUndefined);
  return r;
}

struct SweepRow {
  double p = 0.0;
  double kbt_pev = 0.0;
  Backend backend = Backend::IdealKraus;
  std::optional<CycleReport> report;
  /// Error code name when the point failed; the sweep itself keeps going.
  std::string error;
  std::string error_message;
};

/// Runs every (kBT, p) pair, temperatures outermost, in grid order.
inline std::vector<SweepRow> sweep(const std::vector<double>& p_grid, const std::vector<double>& temps,
                                   const CycleConfig& base) {
  if (p_grid.empty() || temps.empty()) throw Error(ErrorCode::ConfigError, "sweep grids must be non-empty");
  std::vector<SweepRow> rows;
  rows.reserve(p_grid.size() * temps.size());
  for (double kbt : temps) {
    for (double p : p_grid) {
      CycleConfig cfg = base;
      cfg.p = p;
      cfg.kbt_pev = kbt;
      SweepRow row{p, kbt, base.backend, std::nullopt, {}, {}};
      try {
        row.report = run_cycle(cfg);
      } catch (const Error& e) {
        row.error = to_string(e.code());
        row.error_message = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace qme
