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


#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracle_values.hpp"
#include "qmengine/cycle.hpp"
#include "test_support.hpp"

namespace qme {
namespace {

bool has_flag(const CycleReport& r, std::string_view f) {
  return std::find(r.flags.begin(), r.flags.end(), f) != r.flags.end();
}

CycleConfig ideal(double p, double kbt) {
  CycleConfig c;
  c.p = p;
  c.kbt_pev = kbt;
  return c;
}

CycleConfig pulse(double p, double kbt, bool noisy) {
  CycleConfig c = ideal(p, kbt);
  c.backend = Backend::PulseSim;
  if (noisy) c.noise = NoiseModel::sodium_formate();
  return c;
}

std::vector<double> engine_grid() {
  std::vector<double> g;
  for (int k = 11; k <= 20; ++k) g.push_back(k * 0.05);
  return g;
}

TEST(ClosedForms, HeatExamples) {
  EXPECT_EQ(heat_absorbed(0.0, 1.0, 2.98), 0.0);
  EXPECT_NEAR(heat_absorbed(1.0, 1.0, 2.98), oracle::kHeat_1_298, 1e-14);
  EXPECT_NEAR(heat_absorbed(0.75, 1.0, 1.88), oracle::kHeat_075_188, 1e-14);
  EXPECT_NEAR(heat_absorbed(1.0, 1.0, 1e-6), oracle::kHNu, 1e-14);
}

TEST(ClosedForms, WorkExamples) {
  EXPECT_EQ(work_extracted(0.5, 1.0, 2.98), 0.0);
  EXPECT_NEAR(work_extracted(1.0, 1.0, 2.98), oracle::kHeat_1_298, 1e-14);
  EXPECT_NEAR(work_extracted(0.6, 1.0, 1.88), oracle::kWork_06_188, 1e-14);
  EXPECT_GT(work_extracted(0.51, 1.0, 2.98), 0.0);
  EXPECT_LT(work_extracted(0.49, 1.0, 2.98), 0.0);
}

TEST(Efficiency, Law) {
  EXPECT_EQ(efficiency(1.0).value, 1.0);
  EXPECT_TRUE(efficiency(1.0).engine);
  EXPECT_NEAR(efficiency(0.8).value, 0.75, 1e-15);
  const Efficiency boundary = efficiency(0.5);
  EXPECT_EQ(boundary.value, 0.0);
  EXPECT_FALSE(boundary.engine);
  try {
    efficiency(0.4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutsideEngineRegime);
  }
}

TEST(Power, Examples) {
  EXPECT_EQ(extracted_power(0.0, 7.7e-3), 0.0);
  EXPECT_NEAR(extracted_power(work_extracted(1.0, 1.0, 2.98), 7.7e-3), oracle::kPower_1_298, 1e-10);
  EXPECT_THROW(extracted_power(1.0, 0.0), Error);
  for (double kbt : presets::kKbtPev) {
    double prev = -1.0;
    for (double p = 0.51; p <= 1.0; p += 0.01) {
      const double w = extracted_power(work_extracted(p, 1.0, kbt), 7.7e-3);
      EXPECT_GT(w, prev);
      prev = w;
    }
  }
}

TEST(RunCycle, OracleAtThreeQuarters) {
  const CycleReport r = run_cycle(ideal(0.75, 2.98));
  EXPECT_NEAR(r.heat_p, oracle::kHeat_075_298, 1e-12);
  EXPECT_NEAR(r.work_ext, oracle::kWork_075_298, 1e-12);
  EXPECT_NEAR(r.heat_cold, oracle::kHeatCold_075_298, 1e-12);
  EXPECT_NEAR(r.efficiency, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(r.dS_a, oracle::kDSa_075_298, 1e-12);
  EXPECT_NEAR(r.q_used, oracle::kQStar_075_298, 1e-15);
  EXPECT_NEAR(r.rho2.population(0), oracle::kRho2_00_075_298, 1e-14);
  EXPECT_NEAR(r.rho3.population(0), oracle::kRho3_00_075_298, 1e-14);
  EXPECT_TRUE(r.flags.empty());
}

TEST(RunCycle, UnitStrength) {
  const CycleReport r = run_cycle(ideal(1.0, 2.98));
  EXPECT_NEAR(r.heat_p, oracle::kHeat_1_298, 1e-12);
  EXPECT_NEAR(r.work_ext, oracle::kHeat_1_298, 1e-12);
  EXPECT_NEAR(r.efficiency, 1.0, 1e-12);
  EXPECT_NEAR(r.power_ext, oracle::kPower_1_298, 1e-9);
  EXPECT_NEAR(r.dS_a, 0.0, 1e-12);
  EXPECT_TRUE(has_flag(r, flags::kEntropyNotIncreased));
}

TEST(RunCycle, HalfStrengthIsNonEngine) {
  const CycleReport r = run_cycle(ideal(0.5, 2.98));
  EXPECT_NEAR(r.work_ext, 0.0, 1e-15);
  EXPECT_NEAR(r.efficiency, 0.0, 1e-15);
  EXPECT_TRUE(has_flag(r, flags::kNonEngine));
  EXPECT_FALSE(has_flag(r, flags::kNoIsentropicQ));
}

TEST(RunCycle, DiagnosticBelowHalf) {
  const CycleReport r = run_cycle(ideal(0.3, 2.98));
  EXPECT_TRUE(has_flag(r, flags::kNonEngine));
  EXPECT_TRUE(has_flag(r, flags::kNoIsentropicQ));
  EXPECT_EQ(r.q_used, 0.0);
  EXPECT_NEAR(r.heat_p, heat_absorbed(0.3, 1.0, 2.98), 1e-12);
  const CycleReport z = run_cycle(ideal(0.0, 2.98));
  EXPECT_TRUE(has_flag(z, flags::kEtaUndefined));
  EXPECT_TRUE(std::isnan(z.efficiency));
}

TEST(RunCycle, Errors) {
  try {
    run_cycle(ideal(0.75, std::numeric_limits<double>::infinity()));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateCycle);
  }
  CycleConfig c = ideal(0.75, 2.98);
  c.tau_cycle_s = 0.0;
  EXPECT_THROW(run_cycle(c), Error);
  EXPECT_THROW(run_cycle(ideal(1.5, 2.98)), Error);
}

TEST(Property, LedgerAndClosedFormsAcrossGrid) {
  for (double kbt : presets::kKbtPev) {
    for (double p : engine_grid()) {
      const CycleReport r = run_cycle(ideal(p, kbt));
      EXPECT_NEAR(r.heat_cold, r.work_ext - r.heat_p, 1e-12);
      EXPECT_NEAR(r.heat_p, heat_absorbed(p, 1.0, kbt), 1e-12);
      EXPECT_NEAR(r.work_ext, work_extracted(p, 1.0, kbt), 1e-12);
      EXPECT_NEAR(r.efficiency, 2.0 - 1.0 / p, 1e-12);
      EXPECT_LE(std::abs(r.dS_b), 1e-10);
    }
  }
}

TEST(Property, EntropySourceShape) {
  for (double kbt : presets::kKbtPev) {
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 50; ++k) {
      const double p = 0.5 + 0.5 * k / 51.0;
      const double ds = run_cycle(ideal(p, kbt)).dS_a;
      EXPECT_GT(ds, 0.0);
      EXPECT_LT(ds, prev);
      prev = ds;
    }
    EXPECT_NEAR(run_cycle(ideal(1.0, kbt)).dS_a, 0.0, 1e-12);
  }
}

TEST(Sweep, OrderingAndSinglePoint) {
  const std::vector<SweepRow> rows = sweep({0.6, 0.8}, {1.88, 2.98}, CycleConfig{});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].kbt_pev, 1.88);
  EXPECT_EQ(rows[1].p, 0.8);
  EXPECT_EQ(rows[2].kbt_pev, 2.98);
  const std::vector<SweepRow> one = sweep({0.75}, {2.98}, CycleConfig{});
  ASSERT_EQ(one.size(), 1u);
  const CycleReport direct = run_cycle(ideal(0.75, 2.98));
  EXPECT_EQ(one[0].report->heat_p, direct.heat_p);
  EXPECT_EQ(one[0].report->work_ext, direct.work_ext);
  EXPECT_EQ(one[0].report->rho3.matrix(), direct.rho3.matrix());
  EXPECT_THROW(sweep({}, {2.98}, CycleConfig{}), Error);
}

TEST(Sweep, ErrorsBecomeRows) {
  const auto rows = sweep({0.7, 1.3}, {2.98}, CycleConfig{});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].report.has_value());
  EXPECT_FALSE(rows[1].report.has_value());
  EXPECT_EQ(rows[1].error, "InvalidStrength");
}

TEST(Sweep, IdealEfficiencyIsTemperatureIndependent) {
  const auto rows = sweep(engine_grid(), {1.88, 2.98}, CycleConfig{});
  const std::size_t n = engine_grid().size();
  for (std::size_t i = 0; i < n; ++i) {
    EXPECT_NEAR(rows[i].report->efficiency, rows[n + i].report->efficiency, 1e-12);
  }
}

TEST(PulseBackend, NoiselessMatchesIdeal) {
  for (double kbt : presets::kKbtPev) {
    for (double p : {0.55, 0.75, 1.0}) {
      const CycleReport a = run_cycle(ideal(p, kbt));
      const CycleReport b = run_cycle(pulse(p, kbt, false));
      EXPECT_NEAR(b.heat_p, a.heat_p, 1e-10);
      EXPECT_NEAR(b.work_ext, a.work_ext, 1e-10);
      EXPECT_NEAR(b.dS_b, 0.0, 1e-9);
      EXPECT_GE(state_fidelity(a.rho3, b.rho3), 1.0 - 1e-9);
    }
  }
}

TEST(PulseBackend, NoiseIsPerturbative) {
  for (double kbt : presets::kKbtPev) {
    const CycleReport r = run_cycle(pulse(1.0, kbt, true));
    EXPECT_LE(std::abs(r.efficiency - 1.0), 0.05);
    EXPECT_LT(r.efficiency, 1.0);
    for (double p : engine_grid()) EXPECT_LT(std::abs(run_cycle(pulse(p, kbt, true)).dS_b), 5e-3);
  }
}

TEST(PulseBackend, NoisyEfficiencyDependsOnTemperature) {
  CycleConfig base;
  base.backend = Backend::PulseSim;
  base.noise = NoiseModel::sodium_formate();
  const auto rows = sweep(engine_grid(), {1.88, 2.98}, base);
  const std::size_t n = engine_grid().size();
  double max_gap = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    max_gap = std::max(max_gap, std::abs(rows[i].report->efficiency - rows[n + i].report->efficiency));
  }
  EXPECT_GT(max_gap, 1e-6);
}

}  // namespace
}  // namespace qme
