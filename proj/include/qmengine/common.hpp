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

#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace qme {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

/// Physical constants and unit conventions.
///
/// Energies are carried in peV, times in seconds, frequencies in kHz (the
/// spin Hamiltonian offset) or Hz (the scalar coupling).
namespace units {
/// Planck constant expressed so that h * nu[kHz] gives peV.
inline constexpr double kPlanckPevPerKhz = 4.135667696;
/// Planck constant in peV * s.
inline constexpr double kPlanckPevSeconds = 4.135667696e-3;
}  // namespace units

enum class ErrorCode {
  UnsupportedDimension,
  BadSubsystem,
  DimMismatch,
  NotUnitary,
  InvalidState,
  NotThermal,
  InvalidStrength,
  OutsideEngineRegime,
  DegenerateCycle,
  NotTracePreserving,
  InvalidNoise,
  UnstableEstimate,
  NothingToPlot,
  ParseError,
  ConfigError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
    case ErrorCode::BadSubsystem: return "BadSubsystem";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::InvalidState: return "InvalidState";
    case ErrorCode::NotThermal: return "NotThermal";
    case ErrorCode::InvalidStrength: return "InvalidStrength";
    case ErrorCode::OutsideEngineRegime: return "OutsideEngineRegime";
    case ErrorCode::DegenerateCycle: return "DegenerateCycle";
    case ErrorCode::NotTracePreserving: return "NotTracePreserving";
    case ErrorCode::InvalidNoise: return "InvalidNoise";
    case ErrorCode::UnstableEstimate: return "UnstableEstimate";
    case ErrorCode::NothingToPlot: return "NothingToPlot";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace qme
