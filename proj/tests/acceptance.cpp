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


// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fail.
// Tolerances are fixed here on purpose; do not loosen them to make a run pass.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "qmengine/qmengine.hpp"

#ifndef QME_CLI_PATH
#error "QME_CLI_PATH must point at the qmengine executable"
#endif
#ifndef QME_GOLDEN_DIR
#error "QME_GOLDEN_DIR must point at tests/golden"
#endif

namespace {

using namespace qme;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr double kEfficiencyTol = 1e-12;
constexpr double kEnergyTol = 1e-12;
constexpr double kIsentropyTol = 1e-10;
constexpr double kSpectrumTol = 1e-12;
constexpr double kRepresentationFidelity = 1.0 - 1e-10;
constexpr int kRepresentationCases = 1000;
constexpr double kCompilerFidelity = 1.0 - 1e-9;
constexpr int kAngleGrid = 20;
constexpr double kEfficiencyRuntimeS = 1.0;
constexpr double kCompilerRuntimeS = 5.0;
constexpr double kNoisyEtaBand = 0.05;
// Ideal-backend curves for the two temperatures coincide to ~1e-16; a gap
// of 1e-6 is ten orders of magnitude above that floor.
constexpr double kSeparation = 1e-6;
constexpr double kRootNFactor = 2.0;
constexpr int kEntropyGrid = 50;

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(const char* name, const Outcome& o) {
  std::printf("%s %-28s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<double> engine_grid() {
  std::vector<double> g;
  for (int k = 11; k <= 20; ++k) g.push_back(k * 0.05);
  return g;
}

CycleConfig config(double p, double kbt, Backend b = Backend::IdealKraus, bool noisy = false) {
  CycleConfig c;
  c.p = p;
  c.kbt_pev = kbt;
  c.backend = b;
  if (noisy) c.noise = NoiseModel::sodium_formate();
  return c;
}

Outcome efficiency_law() {
  const auto t0 = Clock::now();
  const auto rows = sweep(engine_grid(), {presets::kKbtPev.begin(), presets::kKbtPev.end()}, CycleConfig{});
  const double elapsed = seconds_since(t0);
  double worst = 0.0;
  for (const auto& row : rows) {
    if (!row.report) return {false, "sweep point failed: " + row.error};
    worst = std::max(worst, std::abs(row.report->efficiency - (2.0 - 1.0 / row.p)));
  }
  return {worst <= kEfficiencyTol && elapsed < kEfficiencyRuntimeS,
          fmt::format("max|eta-(2-1/p)|={:.3g} (tol {:g}), runtime {:.3f}s (< {:g}s)", worst, kEfficiencyTol, elapsed,
                      kEfficiencyRuntimeS)};
}

Outcome energetics() {
  double worst = 0.0;
  for (double kbt : presets::kKbtPev) {
    for (double p : engine_grid()) {
      const CycleReport r = run_cycle(config(p, kbt));
      worst = std::max(worst, std::abs(r.heat_p - heat_absorbed(p, 1.0, kbt)));
      worst = std::max(worst, std::abs(r.work_ext - work_extracted(p, 1.0, kbt)));
    }
  }
  const CycleReport one = run_cycle(config(1.0, 2.98));
  return {worst <= kEnergyTol, fmt::format("max deviation {:.3g} peV (tol {:g}); p=1,kBT=2.98: Q={:.7f} W={:.7f}",
                                           worst, kEnergyTol, one.heat_p, one.work_ext)};
}

Outcome isentropy() {
  double worst_ds = 0.0, worst_spec = 0.0;
  for (double kbt : presets::kKbtPev) {
    for (double p : engine_grid()) {
      const CycleReport r = run_cycle(config(p, kbt));
      worst_ds = std::max(worst_ds, std::abs(r.dS_b));
      Eigen::VectorXd e2 = r.rho2.eigenvalues(), e3 = r.rho3.eigenvalues();
      std::sort(e2.data(), e2.data() + e2.size());
      std::sort(e3.data(), e3.data() + e3.size());
      worst_spec = std::max(worst_spec, (e2 - e3).cwiseAbs().maxCoeff());
    }
  }
  return {worst_ds <= kIsentropyTol && worst_spec <= kSpectrumTol,
          fmt::format("max|dS_b|={:.3g} (tol {:g}), spectrum gap {:.3g} (tol {:g})", worst_ds, kIsentropyTol,
                      worst_spec, kSpectrumTol)};
}

Outcome entropy_source() {
  bool positive = true, decreasing = true;
  double end_value = 0.0;
  for (double kbt : presets::kKbtPev) {
    double prev = INFINITY;
    for (int k = 1; k <= kEntropyGrid; ++k) {
      const double p = 0.5 + 0.5 * k / (kEntropyGrid + 1.0);
      const double ds = run_cycle(config(p, kbt)).dS_a;
      positive = positive && ds > 0.0;
      decreasing = decreasing && ds < prev;
      prev = ds;
    }
    end_value = std::max(end_value, std::abs(run_cycle(config(1.0, kbt)).dS_a));
  }
  const bool to_zero = end_value <= 1e-12;
  return {positive && decreasing && to_zero,
          fmt::format("{}-point grid: positive={} decreasing={} |dS_a(p=1)|={:.3g}", kEntropyGrid, positive,
                      decreasing, end_value)};
}

Outcome representation_equivalence() {
  std::mt19937_64 rng(20260101);
  std::uniform_real_distribution<double> up(0.5, 1.0), ut(0.25, 20.0);
  double worst = 1.0;
  for (int i = 0; i < kRepresentationCases; ++i) {
    const double p = up(rng), kbt = ut(rng);
    const SpinHamiltonianParams h{1.0};
    const ThermalParams t{kbt};
    const double om = omega_factor(h, t), tanh = thermal_polarization(h, t);
    const double q = q_star(p, om);
    const QState rho1 = gibbs_state(h, t);

    const QState k2 = apply(kraus_a(p, om), rho1);
    const QState k3 = apply(kraus_b(q), k2);
    const QState c2(0.5 * Matrix::Identity(2, 2) + (0.5 - p) * tanh * pauli::z());
    const QState c3(0.5 * Matrix::Identity(2, 2) - (0.5 - p) * tanh * pauli::z());
    const QState ancilla = QState::basis(2, 0);
    const QState d2 =
        partial_trace(evolve_unitary(tensor_product(rho1, ancilla), dilation_unitary_a(theta_of(p, om))), kSystem);
    const QState d3 = partial_trace(evolve_unitary(tensor_product(d2, ancilla), dilation_unitary_b(phi_of(q))), kSystem);

    for (const auto& [a, b] : {std::pair{&k2, &c2}, {&k2, &d2}, {&c2, &d2}, {&k3, &c3}, {&k3, &d3}, {&c3, &d3}}) {
      worst = std::min(worst, state_fidelity(*a, *b));
    }
  }
  return {worst >= kRepresentationFidelity,
          fmt::format("{} random (p,kBT): min pairwise fidelity 1-{:.3g} (need >= 1-{:g})", kRepresentationCases,
                      1.0 - worst, 1.0 - kRepresentationFidelity)};
}

Outcome compiler_soundness() {
  const auto t0 = Clock::now();
  double worst = 1.0;
  for (int k = 0; k < kAngleGrid; ++k) {
    const double angle = k * std::numbers::pi / kAngleGrid;
    const double s = std::pow(std::sin(0.5 * angle), 2);
    worst = std::min(worst, process_fidelity(effective_channel(compile_channel_a(angle), {}),
                                             choi_matrix(kraus_a(1.0, s))));
    worst = std::min(worst, process_fidelity(effective_channel(compile_channel_b(angle), {}), choi_matrix(kraus_b(s))));
  }
  const double elapsed = seconds_since(t0);
  return {worst >= kCompilerFidelity && elapsed < kCompilerRuntimeS,
          fmt::format("{}-angle grid, both channels: min Choi fidelity 1-{:.3g} (need >= 1-{:g}), runtime {:.3f}s",
                      kAngleGrid, 1.0 - worst, 1.0 - kCompilerFidelity, elapsed)};
}

Outcome noise_perturbativity() {
  const double lo = presets::kKbtLowPev, hi = presets::kKbtHighPev;
  const double eta_lo = run_cycle(config(1.0, lo, Backend::PulseSim, true)).efficiency;
  const double eta_hi = run_cycle(config(1.0, hi, Backend::PulseSim, true)).efficiency;
  double gap = 0.0;
  for (double p : engine_grid()) {
    const double a = run_cycle(config(p, lo, Backend::PulseSim, true)).efficiency;
    const double b = run_cycle(config(p, hi, Backend::PulseSim, true)).efficiency;
    gap = std::max(gap, std::abs(a - b));
  }
  const bool band = std::abs(eta_lo - 1.0) <= kNoisyEtaBand && std::abs(eta_hi - 1.0) <= kNoisyEtaBand;
  return {band && gap > kSeparation,
          fmt::format("eta(p=1) = {:.6f} @1.88, {:.6f} @2.98 (band {:g}); max temperature gap {:.3g} (> {:g})", eta_lo,
                      eta_hi, kNoisyEtaBand, gap, kSeparation)};
}

bool bit_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

Outcome monte_carlo() {
  const CycleReport r = run_cycle(config(0.75, 2.98));
  NoiseSpec zero;
  zero.sigma_mag = zero.sigma_qst = 0.0;
  const CycleEstimates z = estimate_cycle(r, 1.0, 7.7e-3, zero);
  bool collapse = true;
  const std::vector<std::pair<const EstimateWithError*, double>> pairs = {
      {&z.heat_p, r.heat_p}, {&z.work_ext, r.work_ext}, {&z.heat_cold, r.heat_cold},      {&z.dS_a, r.dS_a},
      {&z.dS_b, r.dS_b},     {&z.efficiency, r.efficiency}, {&z.power_ext, r.power_ext}};
  for (const auto& [est, ideal] : pairs) collapse = collapse && est->std == 0.0 && bit_equal(est->mean, ideal);

  NoiseSpec spec;
  spec.seed = 314159;
  const CycleEstimates a = estimate_cycle(r, 1.0, 7.7e-3, spec), b = estimate_cycle(r, 1.0, 7.7e-3, spec);
  bool determinism = true;
  for (auto m : {&CycleEstimates::heat_p, &CycleEstimates::work_ext, &CycleEstimates::heat_cold, &CycleEstimates::dS_a,
                 &CycleEstimates::dS_b, &CycleEstimates::efficiency, &CycleEstimates::power_ext}) {
    determinism = determinism && bit_equal((a.*m).mean, (b.*m).mean) && bit_equal((a.*m).std, (b.*m).std);
  }

  std::vector<double> som;
  for (int n : {100, 1000, 10000}) {
    NoiseSpec s = spec;
    s.n_samples = n;
    som.push_back(estimate_cycle(r, 1.0, 7.7e-3, s).work_ext.std_of_mean());
  }
  bool scaling = true;
  std::string ratios;
  for (std::size_t i = 1; i < som.size(); ++i) {
    const double ratio = som[i - 1] / som[i];
    const double expected = std::sqrt(10.0);
    scaling = scaling && ratio >= expected / kRootNFactor && ratio <= expected * kRootNFactor;
    ratios += fmt::format("{}{:.3f}", ratios.empty() ? "" : ",", ratio);
  }
  return {collapse && determinism && scaling,
          fmt::format("collapse={} determinism={} std-of-mean ratios per decade [{}] (sqrt10=3.162, factor {:g})",
                      collapse, determinism, ratios, kRootNFactor)};
}

// ---- CLI golden files ------------------------------------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string run_cli(const std::string& args, const fs::path& out) {
  const std::string cmd = fmt::format("\"{}\" {} --seed 0 --out \"{}\"", QME_CLI_PATH, args, out.string());
  if (std::system(cmd.c_str()) != 0) return {};
  return slurp(out);
}

Outcome golden_files() {
  const fs::path golden = QME_GOLDEN_DIR;
  const fs::path work = fs::current_path() / "acceptance_out";
  fs::create_directories(work);
  const bool update = std::getenv("QME_UPDATE_GOLDEN") != nullptr;

  struct Case {
    const char* name;
    const char* args;
    bool hash_only;
  };
  const Case cases[] = {
      {"sweep_ideal.csv", "sweep --backend ideal", false},
      {"sweep_pulse.csv", "sweep --backend pulse --noise on", false},
      {"sweep_ideal_eta_power.svg", "sweep --backend ideal --format svg --plot eta-power-vs-p", true},
  };
  std::vector<std::string> problems;
  for (const auto& c : cases) {
    const std::string first = run_cli(c.args, work / (std::string("a_") + c.name));
    const std::string second = run_cli(c.args, work / (std::string("b_") + c.name));
    if (first.empty()) {
      problems.push_back(fmt::format("{}: CLI failed", c.name));
      continue;
    }
    if (first != second) problems.push_back(fmt::format("{}: differs between runs", c.name));
    const std::string actual = c.hash_only ? fmt::format("{:016x}\n", fnv1a(first)) : first;
    const fs::path pinned = golden / (c.hash_only ? std::string(c.name) + ".fnv1a" : std::string(c.name));
    if (update) {
      std::ofstream(pinned, std::ios::binary) << actual;
      continue;
    }
    if (!fs::exists(pinned)) {
      problems.push_back(fmt::format("{}: no golden file", c.name));
    } else if (slurp(pinned) != actual) {
      problems.push_back(fmt::format("{}: differs from {}", c.name, pinned.filename().string()));
    }
  }
  std::string detail = "sweep_ideal.csv, sweep_pulse.csv, svg fnv1a: byte-stable and match pins";
  if (update) detail = "golden files rewritten (QME_UPDATE_GOLDEN set)";
  if (!problems.empty()) {
    detail.clear();
    for (const auto& p : problems) detail += (detail.empty() ? "" : "; ") + p;
  }
  return {problems.empty(), detail};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"efficiency-law", efficiency_law},
      {"energetics-closed-forms", energetics},
      {"isentropic-channel", isentropy},
      {"entropy-source-shape", entropy_source},
      {"representation-equivalence", representation_equivalence},
      {"pulse-compiler-soundness", compiler_soundness},
      {"noise-perturbativity", noise_perturbativity},
      {"monte-carlo-engine", monte_carlo},
      {"cli-golden-files", golden_files},
  };
  for (const auto& [name, check] : criteria) {
    try {
      report(name, check());
    } catch (const std::exception& e) {
      report(name, {false, std::string("threw: ") + e.what()});
    }
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
