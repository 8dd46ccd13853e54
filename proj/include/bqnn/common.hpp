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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace bqnn {

template <class Real>
using Complex = std::complex<Real>;

template <class Real>
using Matrix = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <class Real>
using Vector = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;

template <class Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Random stream used for every stochastic operation in the library.
using Rng = std::mt19937_64;

/// Raised when an argument violates an operation's precondition.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Validation tolerance for hermiticity, unit trace, unitarity and PSD checks.
inline constexpr double kTolerance = 1e-9;

/// Derives an independent stream from a base seed and a stream id.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline std::size_t dimension_of(int qubits) {
  if (qubits < 0 || qubits > 30) throw DomainError("qubit count out of range: " + std::to_string(qubits));
  return std::size_t{1} << qubits;
}

/// Number of qubits n such that 2^n == dim, or -1 when dim is not a power of two.
inline int qubits_of(std::size_t dim) {
  int n = 0;
  while ((std::size_t{1} << n) < dim) ++n;
  return (std::size_t{1} << n) == dim ? n : -1;
}

template <class Derived>
typename Derived::RealScalar hermitian_defect(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

template <class Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& a, double tol = kTolerance) {
  return a.rows() == a.cols() && hermitian_defect(a) < tol;
}

template <class Derived>
bool is_unitary(const Eigen::MatrixBase<Derived>& u, double tol = kTolerance) {
  if (u.rows() != u.cols()) return false;
  const auto n = u.rows();
  using Plain = typename Derived::PlainObject;
  return ((u * u.adjoint()) - Plain::Identity(n, n)).cwiseAbs().maxCoeff() < tol;
}

/// Bit position of qubit q in an n-qubit basis index. Qubit 0 is the leftmost
/// tensor factor, i.e. the most significant bit.
inline int bit_of(int qubit, int total_qubits) { return total_qubits - 1 - qubit; }

}  // namespace bqnn
