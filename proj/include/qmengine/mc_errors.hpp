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

// Monte Carlo error bars: Gaussian deviations of the magnetisation readout
// and of tomographically reconstructed states, pushed through every derived
// quantity of the cycle.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "qmengine/cycle.hpp"

namespace qme {

struct NoiseSpec {
  double sigma_mag = 0.01;  // std of <sigma_z> readout
  double sigma_qst = 0.01;  // std per reconstructed matrix element
  int n_samples = 100;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(sigma_mag >= 0.0) || !(sigma_qst >= 0.0)) throw Error(ErrorCode::ConfigError, "sigmas must be >= 0");
    if (n_samples < 2) throw Error(ErrorCode::ConfigError, "n_samples must be at least 2");
  }
};

struct EstimateWithError {
  double mean = 0.0;
  double std = 0.0;
  int n = 0;
  int discarded = 0;

  double std_of_mean() const { return n > 0 ? std / std::sqrt(static_cast<double>(n)) : 0.0; }
};

/// Random stream of one Monte Carlo draw. Draw k of a given seed always sees
/// the same numbers, whatever order or thread the draws run in.
class DrawStream {
 public:
  DrawStream(std::uint64_t seed, std::uint64_t draw) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(draw), static_cast<std::uint32_t>(draw >> 32)};
    engine_.seed(seq);
  }

  double normal(double sigma) {
    std::normal_distribution<double> dist(0.0, sigma);
    return dist(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

/// Hermitian Gaussian perturbation of a density matrix (lower triangle and
/// diagonal drawn, upper mirrored), then projection back onto valid states by
/// clipping negative eigenvalues and renormalising the trace.
inline QState perturb_state(const QState& rho, double sigma_qst, DrawStream& rng) {
  if (sigma_qst == 0.0) return rho;
  const int d = rho.dim();
  Matrix m = rho.matrix();
  for (int i = 0; i < d; ++i) {
    m(i, i) += rng.normal(sigma_qst);
    for (int j = 0; j < i; ++j) {
      const double re = rng.normal(sigma_qst);
      const double im = rng.normal(sigma_qst);
      m(i, j) += cplx(re, im);
      m(j, i) = std::conj(m(i, j));
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const double total = ev.sum();
  if (!(total > 0.0)) return QState::maximally_mixed(d);
  ev /= total;
  Matrix out = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  return QState(0.5 * (out + out.adjoint()));
}

inline QState perturb_state(const QState& rho, const NoiseSpec& spec, DrawStream& rng) {
  return perturb_state(rho, spec.sigma_qst, rng);
}

/// Mean and sample standard deviation of `quantity` over spec.n_samples
/// draws. `quantity(DrawStream&)` returns std::optional<double>; an empty
/// optional, a non-finite value or a qme::Error discards the draw.
template <class Quantity>
EstimateWithError estimate(Quantity&& quantity, const NoiseSpec& spec) {
  spec.validate();
  EstimateWithError out;
  double m2 = 0.0;
  for (int k = 0; k < spec.n_samples; ++k) {
    DrawStream rng(spec.seed, static_cast<std::uint64_t>(k));
    std::optional<double> v;
    try {
      v = quantity(rng);
    } catch (const Error&) {
      v.reset();
    }
    if (!v || !std::isfinite(*v)) {
      ++out.discarded;
      continue;
    }
    // Welford: a constant input leaves mean bit-identical and m2 exactly 0.
    ++out.n;
    const double delta = *v - out.mean;
    out.mean += delta / out.n;
    m2 += delta * (*v - out.mean);
  }
  if (out.discarded * 5 > spec.n_samples) {
    throw Error(ErrorCode::UnstableEstimate, std::to_string(out.discarded) + " of " +
                                                 std::to_string(spec.n_samples) + " samples discarded");
  }
  out.std = out.n > 1 ? std::sqrt(std::max(m2, 0.0) / (out.n - 1)) : 0.0;
  return out;
}

/// One simulated experimental record of a cycle: energies from the three
/// magnetisation readouts and the three tomographic states.
struct CycleDraw {
  double e1, e2, e3;
  QState rho1, rho2, rho3;

  double heat() const { return e2 - e1; }
  double work() const { return -(e3 - e2); }
  double heat_cold() const { return work() - heat(); }
  double dS_a() const { return von_neumann_entropy(rho2) - von_neumann_entropy(rho1); }
  double dS_b() const { return von_neumann_entropy(rho3) - von_neumann_entropy(rho2); }
  std::optional<double> efficiency() const {
    if (!(heat() > 0.0)) return std::nullopt;
    return work() / heat();
  }
};

inline CycleDraw draw_cycle(const CycleReport& ideal, double nu_khz, const NoiseSpec& spec, DrawStream& rng) {
  const SpinHamiltonianParams h{nu_khz};
  const HermitianOp hc = h.hamiltonian();
  // E = -(h nu / 2) <sigma_z>, so a readout error delta shifts E by -(h nu / 2) delta.
  auto readout = [&](const QState& rho) {
    const double e = expectation(hc, rho);
    return spec.sigma_mag == 0.0 ? e : e - 0.5 * h.h_nu() * rng.normal(spec.sigma_mag);
  };
  const double e1 = readout(ideal.rho1);
  const double e2 = readout(ideal.rho2);
  const double e3 = readout(ideal.rho3);
  QState r1 = perturb_state(ideal.rho1, spec, rng);
  QState r2 = perturb_state(ideal.rho2, spec, rng);
  QState r3 = perturb_state(ideal.rho3, spec, rng);
  return {e1, e2, e3, std::move(r1), std::move(r2), std::move(r3)};
}

struct CycleEstimates {
  EstimateWithError heat_p, work_ext, heat_cold, dS_a, dS_b, efficiency, power_ext;
};

inline CycleEstimates estimate_cycle(const CycleReport& ideal, double nu_khz, double tau_cycle_s,
                                     const NoiseSpec& spec) {
  auto with = [&](auto&& f) {
    return estimate([&](DrawStream& rng) -> std::optional<double> { return f(draw_cycle(ideal, nu_khz, spec, rng)); },
                    spec);
  };
  CycleEstimates out;
  out.heat_p = with([](const CycleDraw& d) -> std::optional<double> { return d.heat(); });
  out.work_ext = with([](const CycleDraw& d) -> std::optional<double> { return d.work(); });
  out.heat_cold = with([](const CycleDraw& d) -> std::optional<double> { return d.heat_cold(); });
  out.dS_a = with([](const CycleDraw& d) -> std::optional<double> { return d.dS_a(); });
  out.dS_b = with([](const CycleDraw& d) -> std::optional<double> { return d.dS_b(); });
  out.efficiency = with([](const CycleDraw& d) { return d.efficiency(); });
  out.power_ext = with([tau_cycle_s](const CycleDraw& d) -> std::optional<double> { return d.work() / tau_cycle_s; });
  return out;
}

}  // namespace qme
