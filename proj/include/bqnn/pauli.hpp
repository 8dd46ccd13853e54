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

// Pauli words and the Pauli-basis (quantum Fourier) expansion of operators.

#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bqnn/common.hpp"

namespace bqnn {

/**
 * @brief A word s in {0,1,2,3}^n naming the tensor product of identity/Pauli
 * matrices sigma^{s_1} (x) ... (x) sigma^{s_n}.
 *
 * Letter 0 is the identity, 1/2/3 are sigma^x/sigma^y/sigma^z. The first
 * letter is the leftmost tensor factor.
 */
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::vector<std::uint8_t> letters) : letters_(std::move(letters)) {
    for (auto l : letters_)
      if (l > 3) throw DomainError("Pauli letter out of range: " + std::to_string(l));
  }

  PauliString(std::initializer_list<int> letters) {
    letters_.reserve(letters.size());
    for (int l : letters) {
      if (l < 0 || l > 3) throw DomainError("Pauli letter out of range: " + std::to_string(l));
      letters_.push_back(static_cast<std::uint8_t>(l));
    }
  }

  static PauliString identity(std::size_t length) {
    return PauliString(std::vector<std::uint8_t>(length, 0));
  }

  /// Inverse of index(): base-4 digits, first letter most significant.
  static PauliString from_index(std::size_t index, std::size_t length) {
    std::vector<std::uint8_t> letters(length, 0);
    for (std::size_t i = length; i-- > 0;) {
      letters[i] = static_cast<std::uint8_t>(index & 3u);
      index >>= 2;
    }
    if (index != 0) throw DomainError("word index exceeds 4^length");
    return PauliString(std::move(letters));
  }

  /// Parses "IXYZ"-style text.
  static PauliString parse(std::string_view text) {
    std::vector<std::uint8_t> letters;
    for (char c : text) {
      switch (c) {
        case 'I': letters.push_back(0); break;
        case 'X': letters.push_back(1); break;
        case 'Y': letters.push_back(2); break;
        case 'Z': letters.push_back(3); break;
        default: throw DomainError(std::string("not a Pauli letter: ") + c);
      }
    }
    return PauliString(std::move(letters));
  }

  std::size_t index() const {
    std::size_t idx = 0;
    for (auto l : letters_) idx = (idx << 2) | l;
    return idx;
  }

  std::size_t size() const { return letters_.size(); }
  std::uint8_t operator[](std::size_t i) const { return letters_[i]; }
  const std::vector<std::uint8_t>& letters() const { return letters_; }

  std::size_t weight() const {
    return static_cast<std::size_t>(std::count_if(letters_.begin(), letters_.end(), [](auto l) { return l != 0; }));
  }
  bool is_identity() const { return weight() == 0; }

  std::string to_string() const {
    static constexpr char kNames[] = {'I', 'X', 'Y', 'Z'};
    std::string out;
    for (auto l : letters_) out.push_back(kNames[l]);
    return out;
  }

  auto operator<=>(const PauliString&) const = default;

 private:
  std::vector<std::uint8_t> letters_;
};

/// The 2x2 identity (0) or Pauli matrix (1, 2, 3).
template <class Real = double>
Matrix<Real> single_pauli(int idx) {
  using C = Complex<Real>;
  Matrix<Real> m(2, 2);
  switch (idx) {
    case 0: m << C(1), C(0), C(0), C(1); break;
    case 1: m << C(0), C(1), C(1), C(0); break;
    case 2: m << C(0), C(0, -1), C(0, 1), C(0); break;
    case 3: m << C(1), C(0), C(0), C(-1); break;
    default: throw DomainError("Pauli index out of range: " + std::to_string(idx));
  }
  return m;
}

template <class Real>
Matrix<Real> kron(const Matrix<Real>& a, const Matrix<Real>& b) {
  Matrix<Real> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

namespace detail {

inline void check_support(std::span<const int> support, int total_qubits) {
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (support[i] < 0 || support[i] >= total_qubits)
      throw DomainError("support position " + std::to_string(support[i]) + " outside [0, " +
                        std::to_string(total_qubits) + ")");
    for (std::size_t j = 0; j < i; ++j)
      if (support[i] == support[j]) throw DomainError("repeated support position " + std::to_string(support[i]));
  }
}

// Gathers the bits of `index` at the support positions into a local index,
// support[0] becoming the most significant local bit.
inline std::size_t gather_bits(std::size_t index, std::span<const int> support, int total_qubits) {
  std::size_t local = 0;
  for (int q : support) local = (local << 1) | ((index >> bit_of(q, total_qubits)) & 1u);
  return local;
}

inline std::size_t scatter_bits(std::size_t local, std::span<const int> support, int total_qubits) {
  std::size_t index = 0;
  const auto k = support.size();
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t bit = (local >> (k - 1 - j)) & 1u;
    index |= bit << bit_of(support[j], total_qubits);
  }
  return index;
}

inline std::size_t support_mask(std::span<const int> support, int total_qubits) {
  std::size_t mask = 0;
  for (int q : support) mask |= std::size_t{1} << bit_of(q, total_qubits);
  return mask;
}

}  // namespace detail

/**
 * @brief Embeds an operator on |support| qubits into the total_qubits space,
 * acting as identity elsewhere. Local factor j lands on qubit support[j].
 */
template <class Real>
Matrix<Real> embed_operator(const Matrix<Real>& local, std::span<const int> support, int total_qubits) {
  detail::check_support(support, total_qubits);
  const auto k = static_cast<int>(support.size());
  if (local.rows() != local.cols() || static_cast<std::size_t>(local.rows()) != dimension_of(k))
    throw DomainError("local operator dimension does not match support size");
  const std::size_t dim = dimension_of(total_qubits);
  const std::size_t local_dim = dimension_of(k);
  const std::size_t mask = detail::support_mask(support, total_qubits);
  Matrix<Real> out = Matrix<Real>::Zero(dim, dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t lr = detail::gather_bits(r, support, total_qubits);
    const std::size_t base = r & ~mask;
    for (std::size_t lc = 0; lc < local_dim; ++lc)
      out(r, base | detail::scatter_bits(lc, support, total_qubits)) = local(lr, lc);
  }
  return out;
}

/// sigma^s on the |s| qubits of the word itself.
template <class Real = double>
Matrix<Real> pauli_operator(const PauliString& s) {
  Matrix<Real> out = Matrix<Real>::Identity(1, 1);
  for (auto l : s.letters()) out = kron<Real>(out, single_pauli<Real>(l));
  return out;
}

/// sigma^s with letter j placed on qubit support[j] of a total_qubits register.
template <class Real = double>
Matrix<Real> pauli_operator(const PauliString& s, int total_qubits, std::span<const int> support) {
  if (support.size() != s.size()) throw DomainError("support size does not match word length");
  return embed_operator<Real>(pauli_operator<Real>(s), support, total_qubits);
}

/**
 * @brief Real Pauli-basis coefficients a_s of a Hermitian operator on
 * `qubits` qubits. Coefficients are stored densely by PauliString::index().
 */
template <class Real = double>
struct FourierSpectrum {
  int qubits = 0;
  RealVector<Real> coefficients;

  explicit FourierSpectrum(int n = 0)
      : qubits(n), coefficients(RealVector<Real>::Zero(static_cast<Eigen::Index>(dimension_of(2 * n)))) {}

  std::size_t size() const { return static_cast<std::size_t>(coefficients.size()); }

  Real coefficient(const PauliString& s) const {
    check(s);
    return coefficients[static_cast<Eigen::Index>(s.index())];
  }
  Real& coefficient(const PauliString& s) {
    check(s);
    return coefficients[static_cast<Eigen::Index>(s.index())];
  }

 private:
  void check(const PauliString& s) const {
    if (s.size() != static_cast<std::size_t>(qubits)) throw DomainError("word length does not match spectrum");
  }
};

/// a_s = 2^-d tr(A sigma^s) for every word s of length d.
template <class Derived>
FourierSpectrum<typename Derived::RealScalar> fourier_coefficients(const Eigen::MatrixBase<Derived>& a) {
  using Real = typename Derived::RealScalar;
  const int d = qubits_of(static_cast<std::size_t>(a.rows()));
  if (a.rows() != a.cols() || d < 0) throw DomainError("operator is not square on a qubit register");
  if (!is_hermitian(a)) throw DomainError("operator is not Hermitian");
  FourierSpectrum<Real> spec(d);
  const Real norm = Real(1) / static_cast<Real>(a.rows());
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    const Matrix<Real> sigma = pauli_operator<Real>(PauliString::from_index(idx, static_cast<std::size_t>(d)));
    // tr(A sigma) = sum_ij A_ij sigma_ji
    const Complex<Real> tr = (a.derived().array() * sigma.transpose().array()).sum();
    spec.coefficients[static_cast<Eigen::Index>(idx)] = norm * tr.real();
  }
  return spec;
}

/// sum_s a_s sigma^s.
template <class Real>
Matrix<Real> synthesize(const FourierSpectrum<Real>& spec) {
  if (spec.qubits < 1) throw DomainError("spectrum must cover at least one qubit");
  if (spec.size() != dimension_of(2 * spec.qubits)) throw DomainError("malformed spectrum");
  const auto dim = static_cast<Eigen::Index>(dimension_of(spec.qubits));
  Matrix<Real> out = Matrix<Real>::Zero(dim, dim);
  for (std::size_t idx = 0; idx < spec.size(); ++idx) {
    const Real a = spec.coefficients[static_cast<Eigen::Index>(idx)];
    if (a != Real(0))
      out += a * pauli_operator<Real>(PauliString::from_index(idx, static_cast<std::size_t>(spec.qubits)));
  }
  return out;
}

}  // namespace bqnn
