// Copyright 2026 The bqnn Authors
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

// Density operators, POVMs and Born-rule sampling on small qubit registers.

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bqnn/common.hpp"
#include "bqnn/pauli.hpp"

namespace bqnn {

template <class Derived>
typename Derived::RealScalar min_eigenvalue(const Eigen::MatrixBase<Derived>& a) {
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

/// Unit-norm state vector on a qubit register.
template <class Real = double>
class PureState {
 public:
  static PureState from_amplitudes(Vector<Real> amplitudes, double tol = kTolerance) {
    const int n = qubits_of(static_cast<std::size_t>(amplitudes.size()));
    if (n < 0) throw DomainError("amplitude count is not a power of two");
    if (std::abs(amplitudes.norm() - Real(1)) > tol) throw DomainError("state vector is not normalized");
    return PureState(n, std::move(amplitudes));
  }

  /// Computational basis state |index> on n qubits.
  static PureState basis(int qubits, std::size_t index) {
    Vector<Real> v = Vector<Real>::Zero(static_cast<Eigen::Index>(dimension_of(qubits)));
    if (index >= static_cast<std::size_t>(v.size())) throw DomainError("basis index out of range");
    v[static_cast<Eigen::Index>(index)] = Real(1);
    return PureState(qubits, std::move(v));
  }

  int qubits() const { return qubits_; }
  const Vector<Real>& amplitudes() const { return amplitudes_; }

 private:
  PureState(int n, Vector<Real> a) : qubits_(n), amplitudes_(std::move(a)) {}

  int qubits_ = 0;
  Vector<Real> amplitudes_;
};

/**
 * @brief Hermitian, positive semidefinite, unit-trace operator on 2^d
 * dimensions.
 *
 * from_matrix() validates its argument. Operations in this library that map
 * valid states to valid states construct their results through unchecked().
 */
template <class Real = double>
class DensityOperator {
 public:
  /// The zero-qubit state (the scalar 1), neutral for tensor().
  DensityOperator() : qubits_(0), matrix_(Matrix<Real>::Identity(1, 1)) {}

  static DensityOperator from_matrix(Matrix<Real> m, double tol = kTolerance) {
    const int n = qubits_of(static_cast<std::size_t>(m.rows()));
    if (m.rows() != m.cols() || n < 0) throw DomainError("density matrix must be square on a qubit register");
    if (!is_hermitian(m, tol)) throw DomainError("density matrix is not Hermitian");
    if (std::abs(m.trace() - Complex<Real>(1)) > tol) throw DomainError("density matrix trace is not 1");
    if (min_eigenvalue(m) < -tol) throw DomainError("density matrix has a negative eigenvalue");
    return DensityOperator(n, std::move(m));
  }

  static DensityOperator unchecked(Matrix<Real> m) {
    const int n = qubits_of(static_cast<std::size_t>(m.rows()));
    return DensityOperator(n, std::move(m));
  }

  /// I / 2^n.
  static DensityOperator maximally_mixed(int qubits) {
    const auto dim = static_cast<Eigen::Index>(dimension_of(qubits));
    return DensityOperator(qubits, Matrix<Real>::Identity(dim, dim) / static_cast<Real>(dim));
  }

  int qubits() const { return qubits_; }
  Eigen::Index dimension() const { return matrix_.rows(); }
  const Matrix<Real>& matrix() const { return matrix_; }
  Complex<Real> operator()(Eigen::Index r, Eigen::Index c) const { return matrix_(r, c); }

 private:
  DensityOperator(int n, Matrix<Real> m) : qubits_(n), matrix_(std::move(m)) {}

  int qubits_;
  Matrix<Real> matrix_;
};

template <class Real = double>
struct PovmElement {
  int label;
  Matrix<Real> op;
};

/// Labelled measurement operators, each PSD, summing to the identity.
template <class Real = double>
class Povm {
 public:
  static Povm create(std::vector<PovmElement<Real>> elements, double tol = kTolerance) {
    if (elements.empty()) throw DomainError("POVM needs at least one element");
    const Eigen::Index dim = elements.front().op.rows();
    const int n = qubits_of(static_cast<std::size_t>(dim));
    if (n < 0) throw DomainError("POVM dimension is not a qubit register");
    Matrix<Real> sum = Matrix<Real>::Zero(dim, dim);
    for (const auto& e : elements) {
      if (e.op.rows() != dim || e.op.cols() != dim) throw DomainError("POVM elements differ in dimension");
      if (!is_hermitian(e.op, tol) || min_eigenvalue(e.op) < -tol)
        throw DomainError("POVM element " + std::to_string(e.label) + " is not PSD");
      sum += e.op;
    }
    if ((sum - Matrix<Real>::Identity(dim, dim)).cwiseAbs().maxCoeff() > tol)
      throw DomainError("POVM elements do not sum to the identity");
    return Povm(n, std::move(elements));
  }

  /// For element sets that are valid by construction (products of valid POVMs).
  static Povm unchecked(std::vector<PovmElement<Real>> elements) {
    const int n = qubits_of(static_cast<std::size_t>(elements.front().op.rows()));
    return Povm(n, std::move(elements));
  }

  int qubits() const { return qubits_; }
  std::size_t size() const { return elements_.size(); }
  const PovmElement<Real>& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<PovmElement<Real>>& elements() const { return elements_; }

  std::vector<int> labels() const {
    std::vector<int> out;
    for (const auto& e : elements_) out.push_back(e.label);
    return out;
  }

 private:
  Povm(int n, std::vector<PovmElement<Real>> e) : qubits_(n), elements_(std::move(e)) {}

  int qubits_ = 0;
  std::vector<PovmElement<Real>> elements_;
};

/// Projective measurement of each listed qubit in the computational basis,
/// one element per bit string (qubits[0] most significant), labelled 0..2^k-1.
template <class Real = double>
Povm<Real> computational_basis_povm(int total_qubits, std::span<const int> qubits) {
  const int k = static_cast<int>(qubits.size());
  std::vector<PovmElement<Real>> elements;
  for (std::size_t outcome = 0; outcome < dimension_of(k); ++outcome) {
    Matrix<Real> local = Matrix<Real>::Zero(dimension_of(k), dimension_of(k));
    local(outcome, outcome) = Real(1);
    elements.push_back({static_cast<int>(outcome), embed_operator<Real>(local, qubits, total_qubits)});
  }
  return Povm<Real>::create(std::move(elements));
}

template <class Real>
DensityOperator<Real> from_ket(const PureState<Real>& psi) {
  if (std::abs(psi.amplitudes().norm() - Real(1)) > kTolerance) throw DomainError("state vector is not normalized");
  return DensityOperator<Real>::unchecked(psi.amplitudes() * psi.amplitudes().adjoint());
}

template <class Real>
DensityOperator<Real> tensor(const DensityOperator<Real>& a, const DensityOperator<Real>& b) {
  return DensityOperator<Real>::unchecked(kron<Real>(a.matrix(), b.matrix()));
}

/// rho (x) |0...0><0...0| with num_aux trailing qubits.
template <class Real>
DensityOperator<Real> pad_sample(const DensityOperator<Real>& rho, int num_aux) {
  if (num_aux < 0) throw DomainError("negative auxiliary qubit count");
  if (num_aux == 0) return rho;
  return tensor(rho, from_ket(PureState<Real>::basis(num_aux, 0)));
}

/// rho (x) |+><+| with the ancilla as the last qubit.
template <class Real>
DensityOperator<Real> attach_plus(const DensityOperator<Real>& rho) {
  Matrix<Real> plus = Matrix<Real>::Constant(2, 2, Complex<Real>(Real(0.5)));
  return DensityOperator<Real>::unchecked(kron<Real>(rho.matrix(), plus));
}

namespace detail {

template <class Real>
DensityOperator<Real> conjugate(const Matrix<Real>& u, const DensityOperator<Real>& rho) {
  Matrix<Real> out = u * rho.matrix() * u.adjoint();
  // Re-symmetrize so hermiticity holds to rounding.
  out = (out + out.adjoint()).eval() * Real(0.5);
  return DensityOperator<Real>::unchecked(std::move(out));
}

}  // namespace detail

/// U rho U^dagger.
template <class Real>
DensityOperator<Real> apply_unitary(const Matrix<Real>& u, const DensityOperator<Real>& rho) {
  if (u.rows() != rho.dimension() || u.cols() != rho.dimension()) throw DomainError("unitary dimension mismatch");
  if (!is_unitary(u)) throw DomainError("operator is not unitary");
  return detail::conjugate(u, rho);
}

/**
 * @brief Born-rule probabilities tr(M_i rho) in POVM element order.
 *
 * Values in (-1e-9, 0) are clamped to zero and the vector renormalized; a
 * more negative value is reported as an error.
 */
template <class Real>
std::vector<Real> outcome_distribution(const Povm<Real>& povm, const DensityOperator<Real>& rho) {
  if (povm.qubits() != rho.qubits()) throw DomainError("POVM and state dimensions differ");
  std::vector<Real> p;
  p.reserve(povm.size());
  Real total = 0;
  bool clamped = false;
  for (const auto& e : povm.elements()) {
    const Complex<Real> tr = (e.op.array() * rho.matrix().transpose().array()).sum();
    Real v = tr.real();
    if (v < 0) {
      if (v < -kTolerance) throw DomainError("negative outcome probability " + std::to_string(v));
      v = 0;
      clamped = true;
    }
    p.push_back(v);
    total += v;
  }
  if (clamped && total > 0)
    for (auto& v : p) v /= total;
  return p;
}

/// Inverse-CDF draw of an element index; ties go to the lower index.
template <class Real>
std::size_t sample_index(std::span<const Real> p, Rng& rng) {
  const double u = uniform01(rng);
  double cumulative = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cumulative += static_cast<double>(p[i]);
    if (u < cumulative) return i;
  }
  // Only reachable through rounding when the total falls short of 1.
  for (std::size_t i = p.size(); i-- > 0;)
    if (p[i] > 0) return i;
  return p.size() - 1;
}

template <class Real>
std::size_t measure_index(const Povm<Real>& povm, const DensityOperator<Real>& rho, Rng& rng) {
  const auto p = outcome_distribution(povm, rho);
  return sample_index<Real>(p, rng);
}

/// Samples one outcome label.
template <class Real>
int measure(const Povm<Real>& povm, const DensityOperator<Real>& rho, Rng& rng) {
  return povm[measure_index(povm, rho, rng)].label;
}

/// Sum of absolute eigenvalues of a Hermitian operator.
template <class Derived>
typename Derived::RealScalar trace_norm(const Eigen::MatrixBase<Derived>& a) {
  if (!is_hermitian(a)) throw DomainError("trace norm requires a Hermitian operator");
  using Plain = typename Derived::PlainObject;
  Eigen::SelfAdjointEigenSolver<Plain> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

/// Reduced state on the kept qubits, in ascending qubit order.
template <class Real>
DensityOperator<Real> partial_trace(const DensityOperator<Real>& rho, std::vector<int> keep) {
  const int n = rho.qubits();
  if (keep.empty()) throw DomainError("partial trace must keep at least one qubit");
  std::sort(keep.begin(), keep.end());
  detail::check_support(keep, n);
  const std::size_t dim = dimension_of(n);
  const std::size_t mask = detail::support_mask(keep, n);
  const auto out_dim = static_cast<Eigen::Index>(dimension_of(static_cast<int>(keep.size())));
  Matrix<Real> out = Matrix<Real>::Zero(out_dim, out_dim);
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t c = 0; c < dim; ++c)
      if ((r & ~mask) == (c & ~mask))
        out(detail::gather_bits(r, keep, n), detail::gather_bits(c, keep, n)) += rho.matrix()(r, c);
  return DensityOperator<Real>::unchecked(std::move(out));
}

}  // namespace bqnn
