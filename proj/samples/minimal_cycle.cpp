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

// Runs one engine cycle on both backends and prints the energy ledger.

#include <fmt/format.h>

#include "qmengine/qmengine.hpp"

int main() {
  qme::CycleConfig cfg;
  cfg.p = 0.9;
  cfg.kbt_pev = qme::presets::kKbtLowPev;

  for (auto backend : {qme::Backend::IdealKraus, qme::Backend::PulseSim}) {
    cfg.backend = backend;
    cfg.noise = backend == qme::Backend::PulseSim ? qme::NoiseModel::sodium_formate() : qme::NoiseModel{};
    const qme::CycleReport r = qme::run_cycle(cfg);
    fmt::print("{:>5}: Q^p = {:.6f} peV, W_ext = {:.6f} peV, eta = {:.6f}, dS^a = {:.6f}, dS^b = {:.2e}\n",
               qme::to_string(backend), r.heat_p, r.work_ext, r.efficiency, r.dS_a, r.dS_b);
  }
  fmt::print("closed form eta = {:.6f}\n", qme::efficiency(cfg.p).value);
}
