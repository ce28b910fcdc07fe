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

// Text tables written by the command-line tool.

#include <string>
#include <vector>

#include <fmt/format.h>

#include "qmengine/cycle.hpp"
#include "qmengine/mc_errors.hpp"

namespace qme {

inline constexpr std::string_view kSweepSchema = "qmengine-sweep-csv/1";
inline constexpr std::string_view kPulseVerifySchema = "qmengine-pulse-verify-csv/1";
inline constexpr std::string_view kMcSchema = "qmengine-mc-csv/1";

/// 12 significant digits; NaN prints as "nan".
inline std::string format_number(double v) { return fmt::format("{:.12g}", v); }

inline std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

namespace table_detail {
inline std::string preamble(std::string_view schema, std::string_view config_echo) {
  std::string out = fmt::format("# schema: {}\n", schema);
  if (!config_echo.empty()) out += fmt::format("# config: {}\n", config_echo);
  return out;
}
}  // namespace table_detail

inline std::string sweep_csv(const std::vector<SweepRow>& rows, std::string_view config_echo = {}) {
  std::string out = table_detail::preamble(kSweepSchema, config_echo);
  out += "p,kBT_pev,heat_pev,work_pev,heat_cold_pev,dSa_nats,dSb_nats,eta,power_pev_per_s,backend,flags\n";
  for (const auto& row : rows) {
    if (!row.report) {
      out += fmt::format("{},{},,,,,,,,{},error:{}\n", format_number(row.p), format_number(row.kbt_pev),
                         to_string(row.backend), row.error);
      continue;
    }
    const CycleReport& r = *row.report;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", format_number(r.p), format_number(r.kbt_pev),
                       format_number(r.heat_p), format_number(r.work_ext), format_number(r.heat_cold),
                       format_number(r.dS_a), format_number(r.dS_b), format_number(r.efficiency),
                       format_number(r.power_ext), to_string(r.backend), join_flags(r.flags));
  }
  return out;
}

struct PulseVerifyRow {
  char channel = 'a';
  double angle = 0.0;
  double fidelity_noiseless = 0.0;
  double fidelity_noisy = 0.0;
  std::size_t op_count = 0;
  double duration_s = 0.0;
};

inline std::string pulse_verify_csv(const std::vector<PulseVerifyRow>& rows, std::string_view config_echo = {}) {
  std::string out = table_detail::preamble(kPulseVerifySchema, config_echo);
  out += "channel,theta,choi_fidelity_noiseless,choi_fidelity_noisy,ops,duration_s\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{},{},{}\n", r.channel, format_number(r.angle), format_number(r.fidelity_noiseless),
                       format_number(r.fidelity_noisy), r.op_count, format_number(r.duration_s));
  }
  return out;
}

struct McRow {
  double p = 0.0;
  double kbt_pev = 0.0;
  std::optional<CycleEstimates> estimates;
  std::string error;
};

inline std::string mc_csv(const std::vector<McRow>& rows, std::string_view config_echo = {}) {
  std::string out = table_detail::preamble(kMcSchema, config_echo);
  out += "p,kBT_pev,heat_mean,heat_std,work_mean,work_std,heat_cold_mean,heat_cold_std,dSa_mean,dSa_std,"
         "dSb_mean,dSb_std,eta_mean,eta_std,power_mean,power_std,n_used,n_discarded,flags\n";
  for (const auto& row : rows) {
    out += fmt::format("{},{},", format_number(row.p), format_number(row.kbt_pev));
    if (!row.estimates) {
      out += fmt::format(",,,,,,,,,,,,,,,,error:{}\n", row.error);
      continue;
    }
    const CycleEstimates& e = *row.estimates;
    for (const EstimateWithError* q : {&e.heat_p, &e.work_ext, &e.heat_cold, &e.dS_a, &e.dS_b, &e.efficiency,
                                       &e.power_ext}) {
      out += fmt::format("{},{},", format_number(q->mean), format_number(q->std));
    }
    out += fmt::format("{},{},\n", e.efficiency.n, e.efficiency.discarded);
  }
  return out;
}

}  // namespace qme
