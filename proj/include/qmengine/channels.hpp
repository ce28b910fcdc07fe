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

// The two non-selective generalized measurement channels of the engine,
// their Stinespring dilations and Choi-matrix verification helpers.

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qmengine/qcore.hpp"

namespace qme {

/// Linear map on operators, used to build Choi matrices from any channel
/// representation (Kraus list, dilation, pulse simulation).
using LinearMap = std::function<Matrix(const Matrix&)>;

namespace tol {
inline constexpr double kCompleteness = 1e-12;
inline constexpr double kChoiTracePreserving = 1e-8;
}  // namespace tol

class KrausChannel {
 public:
  KrausChannel(std::vector<Matrix> ops, std::string label) : ops_(std::move(ops)), label_(std::move(label)) {
    if (ops_.empty()) throw Error(ErrorCode::InvalidStrength, "channel without Kraus operators");
    const Eigen::Index d = ops_.front().rows();
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& k : ops_) {
      if (k.rows() != d || k.cols() != d) throw Error(ErrorCode::DimMismatch, "Kraus operator shapes differ");
      sum += k.adjoint() * k;
    }
    if ((sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol::kCompleteness) {
      throw Error(ErrorCode::NotTracePreserving, "Kraus operators of '" + label_ + "' are not complete");
    }
  }

  static KrausChannel identity(int dim) { return KrausChannel({Matrix::Identity(dim, dim)}, "identity"); }

  int dim() const { return static_cast<int>(ops_.front().rows()); }
  const std::vector<Matrix>& ops() const { return ops_; }
  const std::string& label() const { return label_; }

  /// POVM elements M_i^dagger M_i.
  std::vector<Matrix> povm() const {
    std::vector<Matrix> out;
    out.reserve(ops_.size());
    for (const auto& k : ops_) out.push_back(k.adjoint() * k);
    return out;
  }

  Matrix apply(const Matrix& m) const {
    if (m.rows() != dim() || m.cols() != dim()) throw Error(ErrorCode::DimMismatch, "channel input dimension");
    Matrix out = Matrix::Zero(dim(), dim());
    for (const auto& k : ops_) out += k * m * k.adjoint();
    return out;
  }

  LinearMap as_map() const {
    return [ch = *this](const Matrix& m) { return ch.apply(m); };
  }

 private:
  std::vector<Matrix> ops_;
  std::string label_;
};

inline QState apply(const KrausChannel& ch, const QState& rho) {
  if (ch.dim() != rho.dim()) throw Error(ErrorCode::DimMismatch, "channel and state dimensions differ");
  return QState(ch.apply(rho.matrix()));
}

/// Sequential composition: `second` after `first`.
inline KrausChannel compose(const KrausChannel& second, const KrausChannel& first) {
  std::vector<Matrix> ops;
  for (const auto& b : second.ops()) {
    for (const auto& a : first.ops()) ops.push_back(b * a);
  }
  return KrausChannel(std::move(ops), second.label() + "*" + first.label());
}

namespace detail {
inline void require_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::InvalidStrength, std::string(name) + " = " + std::to_string(v) + " outside [0, 1]");
  }
}
}  // namespace detail

/// Heating channel: M1 = sqrt(1 - p Omega)|0><0| + |1><1|, M2 = sqrt(p Omega)|1><0|.
inline KrausChannel kraus_a(double p, double omega) {
  detail::require_unit_interval(p, "p");
  detail::require_unit_interval(omega, "omega");
  const double s = p * omega;
  if (s > 1.0) throw Error(ErrorCode::InvalidStrength, "p * omega exceeds 1");
  Matrix m1 = Matrix::Zero(2, 2);
  Matrix m2 = Matrix::Zero(2, 2);
  m1(0, 0) = std::sqrt(1.0 - s);
  m1(1, 1) = 1.0;
  m2(1, 0) = std::sqrt(s);
  return KrausChannel({std::move(m1), std::move(m2)}, "M^a");
}

/// Work-extraction channel (amplitude damping toward |0>):
/// M1 = |0><0| + sqrt(1 - q)|1><1|, M2 = sqrt(q)|0><1|.
inline KrausChannel kraus_b(double q) {
  detail::require_unit_interval(q, "q");
  Matrix m1 = Matrix::Zero(2, 2);
  Matrix m2 = Matrix::Zero(2, 2);
  m1(0, 0) = 1.0;
  m1(1, 1) = std::sqrt(1.0 - q);
  m2(0, 1) = std::sqrt(q);
  return KrausChannel({std::move(m1), std::move(m2)}, "M^b");
}

/// Strength of M^b that keeps the von Neumann entropy unchanged after M^a:
/// q = (2p - 1) Omega / ((p - 1) Omega + 1).
inline double q_star(double p, double omega) {
  detail::require_unit_interval(p, "p");
  if (p < 0.5) throw Error(ErrorCode::OutsideEngineRegime, "q_star needs p >= 1/2");
  if (omega == 0.0) throw Error(ErrorCode::DegenerateCycle, "omega = 0 (infinite temperature)");
  detail::require_unit_interval(omega, "omega");
  return (2.0 * p - 1.0) * omega / ((p - 1.0) * omega + 1.0);
}

/// theta = arccos(1 - 2 p Omega), so that p Omega = sin^2(theta / 2).
inline double theta_of(double p, double omega) {
  const double arg = 1.0 - 2.0 * p * omega;
  if (!(arg >= -1.0 && arg <= 1.0)) throw Error(ErrorCode::InvalidStrength, "theta: arccos operand out of range");
  return std::acos(arg);
}

/// phi = arccos(1 - 2 q), so that q = sin^2(phi / 2).
inline double phi_of(double q) {
  const double arg = 1.0 - 2.0 * q;
  if (!(arg >= -1.0 && arg <= 1.0)) throw Error(ErrorCode::InvalidStrength, "phi: arccos operand out of range");
  return std::acos(arg);
}

/// System-ancilla unitary for M^a: |1>|0> is left alone and
/// |0>|0> -> cos(theta/2)|00> + sin(theta/2)|11> (a double-quantum rotation).
inline Matrix dilation_unitary_a(double theta) {
  const double c = std::cos(0.5 * theta);
  const double s = std::sin(0.5 * theta);
  Matrix u = Matrix::Identity(4, 4);
  u(0, 0) = c;
  u(3, 0) = s;
  u(0, 3) = -s;
  u(3, 3) = c;
  return u;
}

/// System-ancilla unitary for M^b: |0>|0> is left alone and
/// |1>|0> -> cos(phi/2)|10> + sin(phi/2)|01> (a zero-quantum rotation).
inline Matrix dilation_unitary_b(double phi) {
  const double c = std::cos(0.5 * phi);
  const double s = std::sin(0.5 * phi);
  Matrix u = Matrix::Identity(4, 4);
  u(2, 2) = c;
  u(1, 2) = s;
  u(2, 1) = -s;
  u(1, 1) = c;
  return u;
}

/// Ancilla projector |0><0| used as the meter's initial state.
inline Matrix ancilla_ground() {
  Matrix g = Matrix::Zero(2, 2);
  g(0, 0) = 1.0;
  return g;
}

/// rho -> tr_ancilla[U (rho (x) |0><0|) U^dagger].
inline LinearMap dilated_map(Matrix u) {
  return [u = std::move(u)](const Matrix& m) {
    return partial_trace(Matrix(u * kron(m, ancilla_ground()) * u.adjoint()), kSystem);
  };
}

/// Normalised Choi matrix (1/d) sum_ij |i><j| (x) map(|i><j|), trace one.
/// The input factor comes first.
inline Matrix choi_matrix(const LinearMap& map, int dim = 2) {
  if (dim != 2) throw Error(ErrorCode::UnsupportedDimension, "Choi matrices are built for qubit maps only");
  Matrix choi = Matrix::Zero(dim * dim, dim * dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      Matrix e = Matrix::Zero(dim, dim);
      e(i, j) = 1.0;
      choi.block(i * dim, j * dim, dim, dim) = map(e) / static_cast<double>(dim);
    }
  }
  const Matrix reduced = partial_trace(choi, kSystem);
  if ((reduced - Matrix::Identity(dim, dim) / static_cast<double>(dim)).cwiseAbs().maxCoeff() >
      tol::kChoiTracePreserving) {
    throw Error(ErrorCode::NotTracePreserving, "Choi input marginal differs from I/d");
  }
  return choi;
}

inline Matrix choi_matrix(const KrausChannel& ch) { return choi_matrix(ch.as_map(), ch.dim()); }

/// Uhlmann fidelity between normalised Choi matrices.
inline double process_fidelity(const Matrix& choi1, const Matrix& choi2) {
  return state_fidelity(choi1, choi2);
}

}  // namespace qme
