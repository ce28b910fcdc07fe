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

// Stroke one: Gibbs state of the working spin and temperature bookkeeping.

#include <array>
#include <cmath>
#include <limits>

#include "qmengine/qcore.hpp"

namespace qme {

struct SpinHamiltonianParams {
  double nu_khz = 1.0;

  /// h * nu in peV.
  double h_nu() const { return units::kPlanckPevPerKhz * nu_khz; }

  /// H^C = -(h nu / 2) sigma_z, in peV.
  HermitianOp hamiltonian() const { return (-0.5 * h_nu()) * pauli::sigma_z(); }
};

struct ThermalParams {
  /// k_B T in peV. +infinity is accepted and means beta = 0.
  double kbt_pev = 2.98;

  double beta_h_nu(const SpinHamiltonianParams& h) const { return h.h_nu() / kbt_pev; }
};

namespace presets {
inline constexpr double kNuKhz = 1.0;
inline constexpr double kKbtLowPev = 1.88;
inline constexpr double kKbtHighPev = 2.98;
inline constexpr std::array<double, 2> kKbtPev = {kKbtLowPev, kKbtHighPev};
}  // namespace presets

namespace detail {
inline void require_positive_temperature(const ThermalParams& t) {
  if (!(t.kbt_pev > 0.0)) {
    throw Error(ErrorCode::NotThermal, "k_B T must be positive, got " + std::to_string(t.kbt_pev));
  }
}
}  // namespace detail

/// exp(-beta H^C)/Z = diag(p0, p1) with p0/p1 = exp(beta h nu).
inline QState gibbs_state(const SpinHamiltonianParams& h, const ThermalParams& t) {
  detail::require_positive_temperature(t);
  const double x = t.beta_h_nu(h);
  // 1/(1+e^x) stays finite for x -> inf and x -> 0.
  const double p1 = 1.0 / (1.0 + std::exp(x));
  const std::array<double, 2> pops{1.0 - p1, p1};
  return QState::diagonal(pops);
}

/// tanh(beta h nu / 2), the sigma_z polarisation of the Gibbs state.
inline double thermal_polarization(const SpinHamiltonianParams& h, const ThermalParams& t) {
  detail::require_positive_temperature(t);
  return std::tanh(0.5 * t.beta_h_nu(h));
}

/// Omega = 1 - exp(-beta h nu).
inline double omega_factor(const SpinHamiltonianParams& h, const ThermalParams& t) {
  detail::require_positive_temperature(t);
  return -std::expm1(-t.beta_h_nu(h));
}

struct SpinTemperature {
  double kbt_pev = 0.0;
  bool zero_temperature = false;
};

/// Effective k_B T of a qubit state from its population ratio.
inline SpinTemperature spin_temperature_of(const QState& rho, const SpinHamiltonianParams& h) {
  if (rho.dim() != 2) throw Error(ErrorCode::DimMismatch, "spin temperature needs a qubit state");
  const double p0 = rho.population(0);
  const double p1 = rho.population(1);
  if (p1 <= 0.0 && p0 > 0.0) return {0.0, true};
  if (!(p0 > p1) || p1 <= 0.0) {
    throw Error(ErrorCode::NotThermal, "populations are not those of a positive temperature");
  }
  return {h.h_nu() / std::log(p0 / p1), false};
}

}  // namespace qme
