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

// Band-limited quantum perceptrons and feed-forward networks built from them.

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <functional>
#include <span>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bqnn/common.hpp"
#include "bqnn/pauli.hpp"
#include "bqnn/state.hpp"

namespace bqnn {

/// Address of one Fourier coefficient: layer, perceptron within the layer,
/// and the local word index (PauliString::index() over the QP's support).
struct ParameterIndex {
  int layer = 0;
  int perceptron = 0;
  std::size_t word = 0;

  auto operator<=>(const ParameterIndex&) const = default;
};

/**
 * @brief A quantum perceptron U = exp(i sum_s a_s sigma^s) whose generator is
 * supported on the qubit subset J.
 *
 * Coefficients are indexed by the local word over J (4^|J| of them,
 * including the identity word).
 */
template <class Real = double>
class BandLimitedQP {
 public:
  BandLimitedQP(std::vector<int> support, RealVector<Real> coefficients)
      : support_(std::move(support)), coefficients_(std::move(coefficients)) {
    if (support_.empty()) throw DomainError("perceptron support is empty");
    for (std::size_t i = 0; i < support_.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (support_[i] == support_[j]) throw DomainError("repeated perceptron support position");
    if (static_cast<std::size_t>(coefficients_.size()) != word_count())
      throw DomainError("perceptron needs 4^|J| = " + std::to_string(word_count()) + " coefficients");
  }

  static BandLimitedQP zero(std::vector<int> support) {
    const auto n = static_cast<Eigen::Index>(dimension_of(2 * static_cast<int>(support.size())));
    return BandLimitedQP(std::move(support), RealVector<Real>::Zero(n));
  }

  const std::vector<int>& support() const { return support_; }
  int locality() const { return static_cast<int>(support_.size()); }
  std::size_t word_count() const { return dimension_of(2 * locality()); }

  const RealVector<Real>& coefficients() const { return coefficients_; }
  RealVector<Real>& coefficients() { return coefficients_; }

  PauliString word(std::size_t w) const { return PauliString::from_index(w, support_.size()); }

  /// Local Hermitian generator sum_s a_s sigma^s on 2^|J| dimensions.
  Matrix<Real> generator() const {
    FourierSpectrum<Real> spec(locality());
    spec.coefficients = coefficients_;
    return synthesize(spec);
  }

  /// exp(i * generator) on the support only.
  Matrix<Real> local_unitary() const {
    Eigen::SelfAdjointEigenSolver<Matrix<Real>> es(generator());
    const auto& v = es.eigenvectors();
    Vector<Real> phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i) phases[i] = std::polar(Real(1), es.eigenvalues()[i]);
    return v * phases.asDiagonal() * v.adjoint();
  }

 private:
  std::vector<int> support_;
  RealVector<Real> coefficients_;
};

/// The perceptron's unitary on the full total_qubits register.
template <class Real>
Matrix<Real> qp_unitary(const BandLimitedQP<Real>& qp, int total_qubits) {
  return embed_operator<Real>(qp.local_unitary(), qp.support(), total_qubits);
}

/**
 * @brief Two-outcome parity readout in the computational basis of the listed
 * qubits: even parity maps to even_label, odd parity to odd_label.
 */
struct ParityReadout {
  std::vector<int> qubits;
  int even_label = -1;
  int odd_label = +1;

  template <class Real = double>
  Povm<Real> povm(int total_qubits) const {
    const int k = static_cast<int>(qubits.size());
    const auto local_dim = static_cast<Eigen::Index>(dimension_of(k));
    Matrix<Real> even = Matrix<Real>::Zero(local_dim, local_dim);
    for (Eigen::Index i = 0; i < local_dim; ++i)
      if (std::popcount(static_cast<unsigned long>(i)) % 2 == 0) even(i, i) = Real(1);
    Matrix<Real> odd = Matrix<Real>::Identity(local_dim, local_dim) - even;
    return Povm<Real>::create({{even_label, embed_operator<Real>(even, qubits, total_qubits)},
                               {odd_label, embed_operator<Real>(odd, qubits, total_qubits)}});
  }

  bool operator==(const ParityReadout&) const = default;
};

/**
 * @brief Layers of band-limited perceptrons on a padded register, followed
 * by a parity readout.
 *
 * The sample occupies qubits [0, sample_qubits); the remaining qubits are
 * auxiliary and start in |0>. Layer l applies its perceptrons in list order.
 */
template <class Real = double>
class Network {
 public:
  using Layer = std::vector<BandLimitedQP<Real>>;

  Network(int sample_qubits, int total_qubits, int bandwidth, std::vector<Layer> layers, ParityReadout readout)
      : sample_qubits_(sample_qubits),
        total_qubits_(total_qubits),
        bandwidth_(bandwidth),
        layers_(std::move(layers)),
        readout_spec_(std::move(readout)) {
    if (sample_qubits_ < 1 || total_qubits_ < sample_qubits_) throw DomainError("need 1 <= d <= d'");
    if (bandwidth_ < 1) throw DomainError("bandwidth must be positive");
    for (const auto& layer : layers_)
      for (const auto& qp : layer) {
        if (qp.locality() > bandwidth_) throw DomainError("perceptron support exceeds the bandwidth");
        detail::check_support(qp.support(), total_qubits_);
      }
    detail::check_support(readout_spec_.qubits, total_qubits_);
    readout_ = readout_spec_.template povm<Real>(total_qubits_);
  }

  int sample_qubits() const { return sample_qubits_; }
  int total_qubits() const { return total_qubits_; }
  int auxiliary_qubits() const { return total_qubits_ - sample_qubits_; }
  int bandwidth() const { return bandwidth_; }
  int layer_count() const { return static_cast<int>(layers_.size()); }
  const std::vector<Layer>& layers() const { return layers_; }
  const BandLimitedQP<Real>& qp(int layer, int j) const { return layers_.at(layer).at(j); }
  BandLimitedQP<Real>& qp(int layer, int j) { return layers_.at(layer).at(j); }
  const ParityReadout& readout_spec() const { return readout_spec_; }
  const Povm<Real>& readout() const { return readout_; }

  std::size_t perceptron_count() const {
    std::size_t m = 0;
    for (const auto& layer : layers_) m += layer.size();
    return m;
  }

  /// c_QNN: total number of Fourier coefficients.
  std::size_t parameter_count() const {
    std::size_t c = 0;
    for (const auto& layer : layers_)
      for (const auto& qp : layer) c += qp.word_count();
    return c;
  }

  /// Every parameter in canonical (layer, perceptron, word) order.
  std::vector<ParameterIndex> parameter_indices() const {
    std::vector<ParameterIndex> out;
    out.reserve(parameter_count());
    for (int l = 0; l < layer_count(); ++l)
      for (int j = 0; j < static_cast<int>(layers_[l].size()); ++j)
        for (std::size_t w = 0; w < layers_[l][j].word_count(); ++w) out.push_back({l, j, w});
    return out;
  }

  bool contains(const ParameterIndex& p) const {
    return p.layer >= 0 && p.layer < layer_count() && p.perceptron >= 0 &&
           p.perceptron < static_cast<int>(layers_[p.layer].size()) &&
           p.word < layers_[p.layer][p.perceptron].word_count();
  }

  Real parameter(const ParameterIndex& p) const { return checked(p).coefficients()[static_cast<Eigen::Index>(p.word)]; }
  Real& parameter(const ParameterIndex& p) {
    return const_cast<BandLimitedQP<Real>&>(checked(p)).coefficients()[static_cast<Eigen::Index>(p.word)];
  }

  /// Flattened parameter vector in canonical order.
  RealVector<Real> parameters() const {
    RealVector<Real> out(static_cast<Eigen::Index>(parameter_count()));
    Eigen::Index i = 0;
    for (const auto& layer : layers_)
      for (const auto& qp : layer) {
        out.segment(i, qp.coefficients().size()) = qp.coefficients();
        i += qp.coefficients().size();
      }
    return out;
  }

  void set_parameters(const RealVector<Real>& flat) {
    if (static_cast<std::size_t>(flat.size()) != parameter_count()) throw DomainError("parameter vector size mismatch");
    Eigen::Index i = 0;
    for (auto& layer : layers_)
      for (auto& qp : layer) {
        qp.coefficients() = flat.segment(i, qp.coefficients().size());
        i += qp.coefficients().size();
      }
  }

  /// Embedded Pauli word addressed by p, on the total register.
  Matrix<Real> parameter_operator(const ParameterIndex& p) const {
    const auto& qp = checked(p);
    return pauli_operator<Real>(qp.word(p.word), total_qubits_, qp.support());
  }

 private:
  const BandLimitedQP<Real>& checked(const ParameterIndex& p) const {
    if (!contains(p))
      throw DomainError("no parameter at (" + std::to_string(p.layer) + ", " + std::to_string(p.perceptron) + ", " +
                        std::to_string(p.word) + ")");
    return layers_[p.layer][p.perceptron];
  }

  int sample_qubits_;
  int total_qubits_;
  int bandwidth_;
  std::vector<Layer> layers_;
  ParityReadout readout_spec_;
  Povm<Real> readout_ = Povm<Real>::create({{0, Matrix<Real>::Identity(1, 1)}});
};

/// U_l = U_{l,m_l} ... U_{l,1}: the perceptron listed last acts last.
template <class Real>
Matrix<Real> layer_unitary(const Network<Real>& net, int layer) {
  const auto dim = static_cast<Eigen::Index>(dimension_of(net.total_qubits()));
  Matrix<Real> u = Matrix<Real>::Identity(dim, dim);
  for (const auto& qp : net.layers().at(layer)) u = (qp_unitary(qp, net.total_qubits()) * u).eval();
  return u;
}

/// Product U_{last-1} ... U_{first} over layers [first, last).
template <class Real>
Matrix<Real> layer_range_unitary(const Network<Real>& net, int first, int last) {
  if (first < 0 || last > net.layer_count() || first > last) throw DomainError("invalid layer range");
  const auto dim = static_cast<Eigen::Index>(dimension_of(net.total_qubits()));
  Matrix<Real> u = Matrix<Real>::Identity(dim, dim);
  for (int l = first; l < last; ++l) u = (layer_unitary(net, l) * u).eval();
  return u;
}

/// U_QNN = U_L ... U_1.
template <class Real>
Matrix<Real> network_unitary(const Network<Real>& net) {
  return layer_range_unitary(net, 0, net.layer_count());
}

/// State after the first `layers` layers, for a state already padded to d' qubits.
template <class Real>
DensityOperator<Real> forward_through(const Network<Real>& net, const DensityOperator<Real>& rho_padded, int layers) {
  if (rho_padded.qubits() != net.total_qubits()) throw DomainError("forward expects a state on d' qubits");
  if (layers == 0) return rho_padded;
  return detail::conjugate(layer_range_unitary(net, 0, layers), rho_padded);
}

template <class Real>
DensityOperator<Real> forward(const Network<Real>& net, const DensityOperator<Real>& rho_padded) {
  return forward_through(net, rho_padded, net.layer_count());
}

/// Pads a d-qubit sample with |0> auxiliaries up to the network register.
template <class Real>
DensityOperator<Real> pad_for(const Network<Real>& net, const DensityOperator<Real>& rho) {
  if (rho.qubits() != net.sample_qubits()) throw DomainError("sample has the wrong qubit count");
  return pad_sample(rho, net.auxiliary_qubits());
}

/// Output state U_QNN (rho (x) |0..0><0..0|) U_QNN^dagger for a d-qubit sample.
template <class Real>
DensityOperator<Real> output_state(const Network<Real>& net, const DensityOperator<Real>& rho) {
  return forward(net, pad_for(net, rho));
}

template <class Real = double>
struct LabeledState {
  DensityOperator<Real> rho;
  int label = 0;
};

/// Loss l(y, y_hat) with a known bound gamma >= max |l|.
template <class Real = double>
class LossFunction {
 public:
  LossFunction(std::function<Real(int, int)> fn, Real bound) : fn_(std::move(fn)), bound_(bound) {}

  static LossFunction zero_one() {
    return LossFunction([](int y, int y_hat) { return y == y_hat ? Real(0) : Real(1); }, Real(1));
  }
  static LossFunction constant(Real c) {
    return LossFunction([c](int, int) { return c; }, std::abs(c));
  }

  Real operator()(int y, int y_hat) const { return fn_(y, y_hat); }
  Real bound() const { return bound_; }

 private:
  std::function<Real(int, int)> fn_;
  Real bound_;
};

template <class Real>
int predict(const Network<Real>& net, const DensityOperator<Real>& rho, Rng& rng) {
  return measure(net.readout(), output_state(net, rho), rng);
}

/// sum_{y_hat} l(y, y_hat) P(y_hat | a, rho).
template <class Real>
Real expected_loss(const Network<Real>& net, const DensityOperator<Real>& rho, int y, const LossFunction<Real>& loss) {
  const auto p = outcome_distribution(net.readout(), output_state(net, rho));
  Real total = 0;
  for (std::size_t i = 0; i < p.size(); ++i) total += loss(y, net.readout()[i].label) * p[i];
  return total;
}

template <class Real>
Real average_expected_loss(const Network<Real>& net, std::type_identity_t<std::span<const LabeledState<Real>>> batch,
                           const LossFunction<Real>& loss) {
  if (batch.empty()) throw DomainError("empty batch");
  const Matrix<Real> u = network_unitary(net);
  Real total = 0;
  for (const auto& sample : batch) {
    const auto p = outcome_distribution(net.readout(), detail::conjugate(u, pad_for(net, sample.rho)));
    for (std::size_t i = 0; i < p.size(); ++i) total += loss(sample.label, net.readout()[i].label) * p[i];
  }
  return total / static_cast<Real>(batch.size());
}

enum class DiscriminationLayout {
  // Layer 1: {0,1} on the sample and {2,3} on the auxiliary pair; layer 2: {0,1}.
  // Readout on {0,1}.
  stacked,
  // Layer 1: {0,2} and {1,3}, coupling each sample qubit to one auxiliary
  // qubit; layer 2: {2,3}. Readout on {2,3}.
  crossed,
};

inline std::string to_string(DiscriminationLayout layout) {
  return layout == DiscriminationLayout::stacked ? "stacked" : "crossed";
}

inline DiscriminationLayout parse_layout(const std::string& text) {
  if (text == "stacked") return DiscriminationLayout::stacked;
  if (text == "crossed") return DiscriminationLayout::crossed;
  throw DomainError("unknown architecture: " + text);
}

/**
 * @brief The two-layer discrimination network: 2-qubit samples padded to
 * four qubits, two 2-local perceptrons in the first layer and one in the
 * second, parity readout (even -> -1).
 *
 * All coefficients start at zero; use init_parameters() to randomize.
 */
template <class Real = double>
Network<Real> discrimination_network(DiscriminationLayout layout = DiscriminationLayout::stacked) {
  using QP = BandLimitedQP<Real>;
  if (layout == DiscriminationLayout::crossed) {
    std::vector<typename Network<Real>::Layer> layers = {{QP::zero({0, 2}), QP::zero({1, 3})}, {QP::zero({2, 3})}};
    return Network<Real>(2, 4, 2, std::move(layers), ParityReadout{{2, 3}, -1, +1});
  }
  std::vector<typename Network<Real>::Layer> layers = {{QP::zero({0, 1}), QP::zero({2, 3})}, {QP::zero({0, 1})}};
  return Network<Real>(2, 4, 2, std::move(layers), ParityReadout{{0, 1}, -1, +1});
}

/// One qubit, one perceptron on it, computational readout with outcome 0
/// labelled +1. With only the X coefficient a set, U = exp(i a X).
template <class Real = double>
Network<Real> single_qubit_network() {
  std::vector<typename Network<Real>::Layer> layers = {{BandLimitedQP<Real>::zero({0})}};
  return Network<Real>(1, 1, 1, std::move(layers), ParityReadout{{0}, +1, -1});
}

}  // namespace bqnn
