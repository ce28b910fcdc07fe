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

// Two-spin pulse-level backend.
//
// A measurement channel is compiled into single-spin rotations and free
// evolutions under the scalar coupling H_J = (h/4) J sigma_z (x) sigma_z,
// then propagated on the 13C (system) x 1H (ancilla) pair with optional
// T1/T2 relaxation between operations.

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "qmengine/channels.hpp"

namespace qme {

enum class PulseKind { Rotation, JEvolution, Gradient };
enum class Spin { H, C, Both };
enum class Axis { X, Y, Z };

struct PulseOp {
  PulseKind kind = PulseKind::Rotation;
  Spin spin = Spin::Both;
  Axis axis = Axis::X;
  double angle = 0.0;     // rad, rotations only
  double duration = 0.0;  // s

  static PulseOp rotation(Spin spin, Axis axis, double angle, double duration = 0.0) {
    return {PulseKind::Rotation, spin, axis, angle, duration};
  }
  static PulseOp j_evolution(double seconds) { return {PulseKind::JEvolution, Spin::Both, Axis::Z, 0.0, seconds}; }
  static PulseOp gradient() { return {PulseKind::Gradient, Spin::Both, Axis::Z, 0.0, 0.0}; }

  friend bool operator==(const PulseOp&, const PulseOp&) = default;
};

struct PulseSequence {
  std::vector<PulseOp> ops;

  double total_duration() const {
    double t = 0.0;
    for (const auto& op : ops) t += op.duration;
    return t;
  }
  std::size_t size() const { return ops.size(); }
  bool empty() const { return ops.empty(); }

  void append(const PulseSequence& other) { ops.insert(ops.end(), other.ops.begin(), other.ops.end()); }

  friend bool operator==(const PulseSequence&, const PulseSequence&) = default;
};

struct CompileOptions {
  double j_coupling_hz = 194.65;
  /// Rf nutation rate; 0 means instantaneous rotations.
  double nutation_rate_hz = 0.0;
  /// Each compiled sequence is padded with a refocused delay up to this length.
  double target_duration_s = 7.7e-3;
  bool simplify = true;
};

/// Per-spin relaxation constants. Defaults are the sodium-formate values
/// measured by inversion recovery (T1) and CPMG (T2).
struct NoiseModel {
  double t1_h = 11.67;
  double t1_c = 22.97;
  double t2_h = 1.31;
  double t2_c = 2.57;
  /// Stationary excited-state population each spin relaxes toward. 1/2 is the
  /// high-temperature NMR equilibrium seen by the deviation density matrix.
  double eq_excited_h = 0.5;
  double eq_excited_c = 0.5;
  bool enabled = false;

  static NoiseModel sodium_formate() {
    NoiseModel n;
    n.enabled = true;
    return n;
  }

  void validate() const {
    auto positive = [](double v) { return v > 0.0; };
    if (!positive(t1_h) || !positive(t1_c) || !positive(t2_h) || !positive(t2_c)) {
      throw Error(ErrorCode::InvalidNoise, "relaxation times must be positive");
    }
    if (t2_h > 2.0 * t1_h || t2_c > 2.0 * t1_c) throw Error(ErrorCode::InvalidNoise, "T2 must not exceed 2 T1");
    if (!(eq_excited_h >= 0.0 && eq_excited_h <= 1.0 && eq_excited_c >= 0.0 && eq_excited_c <= 1.0)) {
      throw Error(ErrorCode::InvalidNoise, "equilibrium populations must lie in [0, 1]");
    }
  }
};

namespace pulse_detail {

inline Matrix single_spin_rotation(Axis axis, double angle) {
  const Matrix sigma = axis == Axis::X ? pauli::x() : axis == Axis::Y ? pauli::y() : pauli::z();
  return std::cos(0.5 * angle) * pauli::identity() - cplx(0.0, std::sin(0.5 * angle)) * sigma;
}

inline Matrix rotation_unitary(Spin spin, Axis axis, double angle) {
  const Matrix r = single_spin_rotation(axis, angle);
  switch (spin) {
    case Spin::C: return kron(r, pauli::identity());
    case Spin::H: return kron(pauli::identity(), r);
    case Spin::Both: return kron(r, r);
  }
  return Matrix::Identity(4, 4);
}

inline Matrix j_evolution_unitary(double seconds, double j_hz) {
  // exp(-i (pi J t / 2) Z(x)Z)
  const double a = 0.5 * std::numbers::pi * j_hz * seconds;
  const cplx minus = std::exp(cplx(0.0, -a));
  const cplx plus = std::exp(cplx(0.0, a));
  Matrix u = Matrix::Zero(4, 4);
  u(0, 0) = minus;
  u(1, 1) = plus;
  u(2, 2) = plus;
  u(3, 3) = minus;
  return u;
}

/// Zero every element between basis states of different total magnetisation.
inline void dephase_in_place(Matrix& m) {
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      if (std::popcount(static_cast<unsigned>(r)) != std::popcount(static_cast<unsigned>(c))) m(r, c) = 0.0;
    }
  }
}

inline std::vector<Matrix> relaxation_kraus(double dt, double t1, double t2, double eq_excited) {
  const double gamma = -std::expm1(-dt / t1);
  const double lambda = std::exp(-dt * (1.0 / t2 - 0.5 / t1));
  const double n = eq_excited;
  std::vector<Matrix> gad(4, Matrix::Zero(2, 2));
  gad[0](0, 0) = std::sqrt(1.0 - n);
  gad[0](1, 1) = std::sqrt((1.0 - n) * (1.0 - gamma));
  gad[1](0, 1) = std::sqrt((1.0 - n) * gamma);
  gad[2](0, 0) = std::sqrt(n * (1.0 - gamma));
  gad[2](1, 1) = std::sqrt(n);
  gad[3](1, 0) = std::sqrt(n * gamma);
  const Matrix pd0 = std::sqrt(0.5 * (1.0 + lambda)) * pauli::identity();
  const Matrix pd1 = std::sqrt(0.5 * (1.0 - lambda)) * pauli::z();
  std::vector<Matrix> out;
  out.reserve(8);
  for (const auto& k : gad) {
    out.push_back(pd0 * k);
    out.push_back(pd1 * k);
  }
  return out;
}

inline double rotation_duration(double angle, const CompileOptions& opts) {
  return opts.nutation_rate_hz > 0.0 ? std::abs(angle) / (2.0 * std::numbers::pi * opts.nutation_rate_hz) : 0.0;
}

/// Wraps an angle into (-pi, pi]; a 2 pi rotation is a global phase.
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  a = std::remainder(a, two_pi);
  if (a <= -std::numbers::pi) a += two_pi;
  return a;
}

/// Local frame rotation V (about `axis` by `angle`) with V Z V^dagger = +-P.
struct Frame {
  bool needed = false;
  Axis axis = Axis::X;
  double angle = 0.0;
};

inline Frame frame_for(Axis target, bool negate) {
  const double half_pi = 0.5 * std::numbers::pi;
  switch (target) {
    case Axis::X: return {true, Axis::Y, negate ? -half_pi : half_pi};
    case Axis::Y: return {true, Axis::X, negate ? half_pi : -half_pi};
    case Axis::Z: return negate ? Frame{true, Axis::X, std::numbers::pi} : Frame{};
  }
  return {};
}

/// Appends exp(-i alpha P_C (x) Q_H) as V^dagger, free J evolution, V.
inline void append_pauli_exponential(PulseSequence& seq, Axis on_c, Axis on_h, double alpha,
                                     const CompileOptions& opts) {
  const Frame fc = frame_for(on_c, alpha < 0.0);
  const Frame fh = frame_for(on_h, false);
  auto rot = [&](Spin s, const Frame& f, double sign) {
    if (!f.needed) return;
    const double a = sign * f.angle;
    seq.ops.push_back(PulseOp::rotation(s, f.axis, a, rotation_duration(a, opts)));
  };
  rot(Spin::C, fc, -1.0);
  rot(Spin::H, fh, -1.0);
  seq.ops.push_back(PulseOp::j_evolution(2.0 * std::abs(alpha) / (std::numbers::pi * opts.j_coupling_hz)));
  rot(Spin::C, fc, 1.0);
  rot(Spin::H, fh, 1.0);
}

/// Delay refocused by a pair of proton pi pulses, identity on the spins.
inline void append_refocused_delay(PulseSequence& seq, const CompileOptions& opts) {
  const double pi_len = rotation_duration(std::numbers::pi, opts);
  const double free = opts.target_duration_s - seq.total_duration() - 2.0 * pi_len;
  if (!(free > 0.0)) return;
  seq.ops.push_back(PulseOp::j_evolution(0.5 * free));
  seq.ops.push_back(PulseOp::rotation(Spin::H, Axis::X, std::numbers::pi, pi_len));
  seq.ops.push_back(PulseOp::j_evolution(0.5 * free));
  seq.ops.push_back(PulseOp::rotation(Spin::H, Axis::X, std::numbers::pi, pi_len));
}

inline bool acts_on(const PulseOp& op, Spin s) { return op.spin == Spin::Both || op.spin == s; }

}  // namespace pulse_detail

/// Peephole pass: merges adjacent same-axis rotations on a spin (across
/// rotations of the other spin, which commute), merges consecutive free
/// evolutions and drops identity operations.
inline PulseSequence simplify(PulseSequence seq, const CompileOptions& opts = {}) {
  using namespace pulse_detail;
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<PulseOp> out;
    out.reserve(seq.ops.size());
    for (const auto& op : seq.ops) {
      if (op.kind == PulseKind::Rotation && wrap_angle(op.angle) == 0.0) {
        changed = true;
        continue;
      }
      if (op.kind == PulseKind::JEvolution && op.duration == 0.0) {
        changed = true;
        continue;
      }
      out.push_back(op);
    }
    for (std::size_t i = 0; i < out.size() && !changed; ++i) {
      PulseOp& a = out[i];
      if (a.kind == PulseKind::JEvolution && i + 1 < out.size() && out[i + 1].kind == PulseKind::JEvolution) {
        a.duration += out[i + 1].duration;
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i + 1));
        changed = true;
        break;
      }
      if (a.kind != PulseKind::Rotation) continue;
      for (std::size_t j = i + 1; j < out.size(); ++j) {
        const PulseOp& b = out[j];
        if (b.kind == PulseKind::Rotation && b.spin == a.spin && b.axis == a.axis) {
          a.angle = wrap_angle(a.angle + b.angle);
          a.duration = rotation_duration(a.angle, opts);
          out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
          changed = true;
          break;
        }
        const bool commutes = b.kind == PulseKind::Rotation && a.spin != Spin::Both && b.spin != Spin::Both &&
                              b.spin != a.spin;
        if (!commutes) break;
      }
    }
    seq.ops = std::move(out);
  }
  return seq;
}

namespace pulse_detail {
/// Generator weights of the two commuting Pauli exponentials
/// exp(-i a X_C Y_H) exp(-i b Y_C X_H).
struct XyYxAngles {
  double xy = 0.0;
  double yx = 0.0;
};

inline PulseSequence emit(XyYxAngles angles, const CompileOptions& opts, bool pad) {
  PulseSequence seq;
  append_pauli_exponential(seq, Axis::X, Axis::Y, angles.xy, opts);
  append_pauli_exponential(seq, Axis::Y, Axis::X, angles.yx, opts);
  if (opts.simplify) seq = simplify(std::move(seq), opts);
  if (pad) append_refocused_delay(seq, opts);
  return seq;
}

// dilation_unitary_a(theta) = exp(-i theta/4 (XY + YX)),
// dilation_unitary_b(phi)   = exp(-i phi/4 (XY - YX)).
inline XyYxAngles angles_a(double theta) { return {0.25 * theta, 0.25 * theta}; }
inline XyYxAngles angles_b(double phi) { return {0.25 * phi, -0.25 * phi}; }
}  // namespace pulse_detail

inline PulseSequence compile_channel_a(double theta, const CompileOptions& opts = {}) {
  return pulse_detail::emit(pulse_detail::angles_a(theta), opts, true);
}

inline PulseSequence compile_channel_b(double phi, const CompileOptions& opts = {}) {
  return pulse_detail::emit(pulse_detail::angles_b(phi), opts, true);
}

/// Angle of the double-quantum rotation that, together with the
/// zero-quantum rotation phi_of(q), moves the ground population exactly as
/// M^b after M^a does: p Omega (1 - q) = sin^2(theta'/2).
inline double composed_theta(double p, double omega, double q) {
  const double x = p * omega * (1.0 - q);
  return std::acos(std::clamp(1.0 - 2.0 * x, -1.0, 1.0));
}

/// Both channels back to back as the literal concatenation of the two
/// rotation blocks, before any commutation-based merging. Not padded.
inline PulseSequence compile_composed_unmerged(double p, double omega, double q, const CompileOptions& opts = {}) {
  using namespace pulse_detail;
  CompileOptions raw = opts;
  raw.simplify = false;
  PulseSequence seq = emit(angles_b(phi_of(q)), raw, false);
  seq.append(emit(angles_a(composed_theta(p, omega, q)), raw, false));
  return seq;
}

/// Both channels in one shortened sequence. All XY and YX exponentials
/// commute, so the four blocks collapse into two.
inline PulseSequence compile_composed(double p, double omega, double q, const CompileOptions& opts = {}) {
  using namespace pulse_detail;
  const XyYxAngles b = angles_b(phi_of(q));
  const XyYxAngles a = angles_a(composed_theta(p, omega, q));
  return emit({a.xy + b.xy, a.yx + b.yx}, opts, true);
}

inline PulseSequence compile_composed(double p, double omega, const CompileOptions& opts = {}) {
  return compile_composed(p, omega, q_star(p, omega), opts);
}

/// Per-spin generalized amplitude damping (rate 1/T1) plus pure dephasing
/// (rate 1/T2 - 1/(2 T1)) over `dt` seconds.
inline Matrix relaxation_step(const Matrix& rho, double dt, const NoiseModel& noise) {
  noise.validate();
  if (dt < 0.0) throw Error(ErrorCode::InvalidNoise, "negative relaxation interval");
  if (dt == 0.0) return rho;
  Matrix out = rho;
  const auto apply_spin = [&out](const std::vector<Matrix>& kraus, bool system) {
    Matrix acc = Matrix::Zero(4, 4);
    for (const auto& k : kraus) {
      const Matrix big = system ? kron(k, pauli::identity()) : kron(pauli::identity(), k);
      acc += big * out * big.adjoint();
    }
    out = acc;
  };
  apply_spin(pulse_detail::relaxation_kraus(dt, noise.t1_c, noise.t2_c, noise.eq_excited_c), true);
  apply_spin(pulse_detail::relaxation_kraus(dt, noise.t1_h, noise.t2_h, noise.eq_excited_h), false);
  return out;
}

inline QState relaxation_step(const QState& rho, double dt, const NoiseModel& noise) {
  if (rho.dim() != 4) throw Error(ErrorCode::DimMismatch, "relaxation acts on the two-spin state");
  return QState(relaxation_step(rho.matrix(), dt, noise));
}

inline QState gradient_dephase(const QState& rho) {
  if (rho.dim() != 4) throw Error(ErrorCode::DimMismatch, "gradient acts on the two-spin state");
  Matrix m = rho.matrix();
  pulse_detail::dephase_in_place(m);
  return QState(std::move(m));
}

/// Called after every operation (and its relaxation) with the running state.
using StepObserver = std::function<void(std::size_t step, const Matrix& rho)>;

/// Propagates an arbitrary 4x4 operator; linear in `rho`.
inline Matrix propagate(const PulseSequence& seq, Matrix rho, const NoiseModel& noise, double j_hz = 194.65,
                        const StepObserver& observer = {}) {
  if (rho.rows() != 4 || rho.cols() != 4) throw Error(ErrorCode::DimMismatch, "pulse simulation needs 4x4");
  if (noise.enabled) noise.validate();
  for (std::size_t i = 0; i < seq.ops.size(); ++i) {
    const PulseOp& op = seq.ops[i];
    switch (op.kind) {
      case PulseKind::Rotation: {
        const Matrix u = pulse_detail::rotation_unitary(op.spin, op.axis, op.angle);
        rho = u * rho * u.adjoint();
        break;
      }
      case PulseKind::JEvolution: {
        const Matrix u = pulse_detail::j_evolution_unitary(op.duration, j_hz);
        rho = u * rho * u.adjoint();
        break;
      }
      case PulseKind::Gradient: pulse_detail::dephase_in_place(rho); break;
    }
    if (noise.enabled && op.duration > 0.0) rho = relaxation_step(rho, op.duration, noise);
    if (observer) observer(i, rho);
  }
  return rho;
}

inline QState simulate(const PulseSequence& seq, const QState& rho, const NoiseModel& noise, double j_hz = 194.65,
                       const StepObserver& observer = {}) {
  if (rho.dim() != 4) throw Error(ErrorCode::DimMismatch, "pulse simulation needs a two-spin state");
  return QState(propagate(seq, rho.matrix(), noise, j_hz, observer));
}

/// Product of the sequence's unitaries; gradients are rejected.
inline Matrix sequence_unitary(const PulseSequence& seq, double j_hz = 194.65) {
  Matrix u = Matrix::Identity(4, 4);
  for (const auto& op : seq.ops) {
    if (op.kind == PulseKind::Gradient) throw Error(ErrorCode::NotUnitary, "gradient is not unitary");
    const Matrix step = op.kind == PulseKind::Rotation ? pulse_detail::rotation_unitary(op.spin, op.axis, op.angle)
                                                       : pulse_detail::j_evolution_unitary(op.duration, j_hz);
    u = step * u;
  }
  return u;
}

/// Map induced on the 13C spin with the proton starting in |0><0|.
inline LinearMap induced_map(const PulseSequence& seq, const NoiseModel& noise, double j_hz = 194.65) {
  return [seq, noise, j_hz](const Matrix& m) {
    return partial_trace(propagate(seq, kron(m, ancilla_ground()), noise, j_hz), kSystem);
  };
}

/// Choi matrix of the induced 13C map.
inline Matrix effective_channel(const PulseSequence& seq, const NoiseModel& noise, double j_hz = 194.65) {
  return choi_matrix(induced_map(seq, noise, j_hz), 2);
}

// Text format: one op per line,
//   ROT <H|C|both> <x|y|z> <angle_rad>
//   JEV <seconds>
//   GRAD
// with '#' starting a comment.

inline std::string to_text(const PulseSequence& seq) {
  std::string out = "# qmengine pulse sequence\n";
  for (const auto& op : seq.ops) {
    switch (op.kind) {
      case PulseKind::Rotation: {
        const char* spin = op.spin == Spin::H ? "H" : op.spin == Spin::C ? "C" : "both";
        const char* axis = op.axis == Axis::X ? "x" : op.axis == Axis::Y ? "y" : "z";
        out += fmt::format("ROT {} {} {}\n", spin, axis, op.angle);
        break;
      }
      case PulseKind::JEvolution: out += fmt::format("JEV {}\n", op.duration); break;
      case PulseKind::Gradient: out += "GRAD\n"; break;
    }
  }
  return out;
}

namespace pulse_detail {
inline double parse_number(std::string_view tok, std::size_t line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
    throw Error(ErrorCode::ParseError, fmt::format("line {}: bad number '{}'", line, tok));
  }
  return v;
}
}  // namespace pulse_detail

/// Parses the text format. Rotation durations follow `opts.nutation_rate_hz`.
inline PulseSequence parse_pulse_sequence(std::string_view text, const CompileOptions& opts = {}) {
  PulseSequence seq;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream words(raw);
    std::vector<std::string> tok;
    for (std::string w; words >> w;) tok.push_back(w);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& why) {
      throw Error(ErrorCode::ParseError, fmt::format("line {}: {}", line_no, why));
    };
    if (tok[0] == "ROT") {
      if (tok.size() != 4) fail("ROT expects <spin> <axis> <angle>");
      Spin spin{};
      if (tok[1] == "H") spin = Spin::H;
      else if (tok[1] == "C") spin = Spin::C;
      else if (tok[1] == "both") spin = Spin::Both;
      else fail("unknown spin '" + tok[1] + "'");
      Axis axis{};
      if (tok[2] == "x") axis = Axis::X;
      else if (tok[2] == "y") axis = Axis::Y;
      else if (tok[2] == "z") axis = Axis::Z;
      else fail("unknown axis '" + tok[2] + "'");
      const double angle = pulse_detail::parse_number(tok[3], line_no);
      if (!(angle > -2.0 * std::numbers::pi && angle <= 2.0 * std::numbers::pi)) fail("angle outside (-2pi, 2pi]");
      seq.ops.push_back(PulseOp::rotation(spin, axis, angle, pulse_detail::rotation_duration(angle, opts)));
    } else if (tok[0] == "JEV") {
      if (tok.size() != 2) fail("JEV expects <seconds>");
      const double t = pulse_detail::parse_number(tok[1], line_no);
      if (!(t >= 0.0)) fail("negative duration");
      seq.ops.push_back(PulseOp::j_evolution(t));
    } else if (tok[0] == "GRAD") {
      if (tok.size() != 1) fail("GRAD takes no arguments");
      seq.ops.push_back(PulseOp::gradient());
    } else {
      fail("unknown op '" + tok[0] + "'");
    }
  }
  return seq;
}

}  // namespace qme
