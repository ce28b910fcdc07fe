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

// Dense linear algebra for one and two qubits.
//
// Two-qubit objects are ordered system (13C) first, ancilla (1H) second, so
// the basis index of |s a> is 2*s + a.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "qmengine/common.hpp"

namespace qme {

inline constexpr int kSystem = 0;
inline constexpr int kAncilla = 1;

namespace tol {
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPositive = 1e-10;
inline constexpr double kUnitary = 1e-12;
inline constexpr double kEntropyFloor = 1e-14;
}  // namespace tol

namespace detail {

inline bool supported_dim(Eigen::Index d) { return d == 2 || d == 4; }

inline void require_square_supported(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || !supported_dim(m.rows())) {
    throw Error(ErrorCode::UnsupportedDimension,
                std::string(what) + " must be 2x2 or 4x4, got " + std::to_string(m.rows()) +
                    "x" + std::to_string(m.cols()));
  }
}

inline double hermiticity_error(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Eigen::VectorXd hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Square root of a Hermitian PSD matrix; negative eigenvalues are clamped.
inline Matrix sqrt_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Returns an empty string when `m` is a valid density matrix, otherwise a
/// description of the first violated invariant.
inline std::string state_violation(const Matrix& m) {
  if (m.rows() != m.cols() || !detail::supported_dim(m.rows())) return "unsupported dimension";
  if (detail::hermiticity_error(m) > tol::kHermitian) return "not Hermitian";
  if (std::abs(m.trace() - cplx(1.0, 0.0)) > tol::kTrace) return "trace differs from 1";
  Matrix h = 0.5 * (m + m.adjoint());
  if (detail::hermitian_eigenvalues(h).minCoeff() < -tol::kPositive) return "not positive semidefinite";
  return {};
}

/// Density matrix of one or two qubits.
///
/// Construction always checks the shape. Builds with QME_VALIDATE_STATES
/// defined also check Hermiticity, trace and positivity after every
/// operation that produces a state; use QState::checked to force that.
class QState {
 public:
  explicit QState(Matrix m) : m_(std::move(m)) {
    detail::require_square_supported(m_, "QState");
#ifdef QME_VALIDATE_STATES
    validate();
#endif
  }

  static QState checked(Matrix m) {
    QState s(std::move(m));
    s.validate();
    return s;
  }

  static QState maximally_mixed(int dim) {
    return QState(Matrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  static QState basis(int dim, int k) {
    Matrix m = Matrix::Zero(dim, dim);
    m(k, k) = 1.0;
    return QState(std::move(m));
  }

  static QState pure(const Eigen::VectorXcd& psi) {
    Eigen::VectorXcd v = psi / psi.norm();
    return QState(v * v.adjoint());
  }

  static QState diagonal(std::span<const double> populations) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(populations.size()),
                            static_cast<Eigen::Index>(populations.size()));
    for (std::size_t i = 0; i < populations.size(); ++i) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = populations[i];
    }
    return QState(std::move(m));
  }

  void validate() const {
    if (auto why = state_violation(m_); !why.empty()) throw Error(ErrorCode::InvalidState, why);
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  cplx operator()(int i, int j) const { return m_(i, j); }
  double population(int k) const { return m_(k, k).real(); }

  Eigen::VectorXd eigenvalues() const {
    return detail::hermitian_eigenvalues(0.5 * (m_ + m_.adjoint()));
  }

 private:
  Matrix m_;
};

/// Hermitian operator (observable or Hamiltonian). Hamiltonians are in peV.
class HermitianOp {
 public:
  explicit HermitianOp(Matrix m) : m_(std::move(m)) {
    detail::require_square_supported(m_, "HermitianOp");
    if (detail::hermiticity_error(m_) > tol::kHermitian) {
      throw Error(ErrorCode::InvalidState, "operator is not Hermitian");
    }
  }

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

  friend HermitianOp operator*(double s, const HermitianOp& a) { return HermitianOp(s * a.m_); }
  friend HermitianOp operator+(const HermitianOp& a, const HermitianOp& b) {
    if (a.dim() != b.dim()) throw Error(ErrorCode::DimMismatch, "operator sum");
    return HermitianOp(a.m_ + b.m_);
  }

 private:
  Matrix m_;
};

namespace pauli {
inline Matrix identity() { return Matrix::Identity(2, 2); }
inline Matrix x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix y() {
  Matrix m(2, 2);
  m << 0, cplx(0, -1), cplx(0, 1), 0;
  return m;
}
inline Matrix z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline HermitianOp sigma_x() { return HermitianOp(x()); }
inline HermitianOp sigma_y() { return HermitianOp(y()); }
inline HermitianOp sigma_z() { return HermitianOp(z()); }
}  // namespace pauli

/// Kronecker product of square matrices; the result is limited to 4x4.
inline Matrix kron(const Matrix& a, const Matrix& b) {
  const Eigen::Index n = a.rows() * b.rows();
  if (n > 4) {
    throw Error(ErrorCode::UnsupportedDimension,
                "tensor product would be " + std::to_string(n) + "x" + std::to_string(n));
  }
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline QState tensor_product(const QState& a, const QState& b) {
  return QState(kron(a.matrix(), b.matrix()));
}

inline HermitianOp tensor_product(const HermitianOp& a, const HermitianOp& b) {
  return HermitianOp(kron(a.matrix(), b.matrix()));
}

/// Reduces a 4x4 operator to one qubit, keeping subsystem `keep` (kSystem or
/// kAncilla). Works on arbitrary matrices, not only states.
inline Matrix partial_trace(const Matrix& m, int keep) {
  if (m.rows() != 4 || m.cols() != 4) {
    throw Error(ErrorCode::DimMismatch, "partial_trace expects a 4x4 operator");
  }
  if (keep != kSystem && keep != kAncilla) {
    throw Error(ErrorCode::BadSubsystem, "subsystem index " + std::to_string(keep));
  }
  Matrix out = Matrix::Zero(2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      for (int k = 0; k < 2; ++k) {
        const int r = keep == kSystem ? 2 * i + k : 2 * k + i;
        const int c = keep == kSystem ? 2 * j + k : 2 * k + j;
        out(i, j) += m(r, c);
      }
    }
  }
  return out;
}

inline QState partial_trace(const QState& rho, int keep) {
  return QState(partial_trace(rho.matrix(), keep));
}

/// S(rho) = -tr(rho ln rho) in nats. Eigenvalues below 1e-14 contribute zero.
inline double von_neumann_entropy(const QState& rho) {
  double s = 0.0;
  for (double lambda : rho.eigenvalues()) {
    if (lambda > tol::kEntropyFloor) s -= lambda * std::log(lambda);
  }
  return std::max(s, 0.0);
}

/// tr(A rho); the imaginary residue of a Hermitian pair is discarded.
inline double expectation(const HermitianOp& a, const QState& rho) {
  if (a.dim() != rho.dim()) {
    throw Error(ErrorCode::DimMismatch, "expectation: operator " + std::to_string(a.dim()) +
                                            " vs state " + std::to_string(rho.dim()));
  }
  return (a.matrix() * rho.matrix()).trace().real();
}

inline bool is_unitary(const Matrix& u, double tolerance = tol::kUnitary) {
  if (u.rows() != u.cols()) return false;
  return ((u.adjoint() * u) - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() <=
         tolerance;
}

inline QState evolve_unitary(const QState& rho, const Matrix& u) {
  if (u.rows() != rho.dim() || u.cols() != rho.dim()) {
    throw Error(ErrorCode::DimMismatch, "evolve_unitary: unitary/state dimension mismatch");
  }
  if (!is_unitary(u)) throw Error(ErrorCode::NotUnitary, "U^dagger U differs from identity");
  return QState(u * rho.matrix() * u.adjoint());
}

/// Uhlmann fidelity F = tr sqrt(sqrt(rho) sigma sqrt(rho)), in [0, 1].
inline double state_fidelity(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw Error(ErrorCode::DimMismatch, "fidelity of states with different dimension");
  }
  double f = 0.0;
  if (rho.rows() == 2) {
    // Qubit closed form: F^2 = tr(rho sigma) + 2 sqrt(det rho det sigma).
    const double overlap = (rho * sigma).trace().real();
    const double dets = std::max(rho.determinant().real(), 0.0) *
                        std::max(sigma.determinant().real(), 0.0);
    f = std::sqrt(std::max(overlap + 2.0 * std::sqrt(dets), 0.0));
  } else {
    const Matrix root = detail::sqrt_psd(0.5 * (rho + rho.adjoint()));
    const Matrix inner = root * sigma * root;
    for (double lambda : detail::hermitian_eigenvalues(0.5 * (inner + inner.adjoint()))) {
      if (lambda > 0.0) f += std::sqrt(lambda);
    }
  }
  return std::clamp(f, 0.0, 1.0);
}

inline double state_fidelity(const QState& rho, const QState& sigma) {
  return state_fidelity(rho.matrix(), sigma.matrix());
}

}  // namespace qme
