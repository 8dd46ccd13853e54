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

// Single-shot derivative measurement and the exact gradients it is checked
// against.
//
// The measurement circuit for coefficient a_{l,j,s}: pad the sample, run
// layers 1..l, attach a |+> ancilla, conjugate by V_s^dagger, run layers
// l+1..L (identity on the ancilla) and measure Lambda_{b,y} = M_y (x) |b><b|.
// The shot value is z = -2 (-1)^b l(y, y_hat). Its mean equals
//
//   i sum_y l(y, y_hat) tr(M_y^prop [sigma^s, rho^mid]),
//
// the commutator-form derivative with sigma^s inserted right after layer l.
// Conjugating by V_s rather than V_s^dagger flips the sign of the mean.

#pragma once

#include <cmath>
#include <ostream>
#include <vector>

#include "bqnn/common.hpp"
#include "bqnn/qnn.hpp"
#include "bqnn/state.hpp"

namespace bqnn {

template <class Real = double>
struct GradientShot {
  ParameterIndex param;
  Real z = 0;
  int outcome_label = 0;
  int ancilla_bit = 0;
};

/**
 * @brief V_s = e^{i pi/4 sigma} (x) |0><0| + e^{-i pi/4 sigma} (x) |1><1| for
 * an embedded Pauli word sigma; the ancilla is the last qubit.
 */
template <class Real>
Matrix<Real> build_vs(const Matrix<Real>& sigma) {
  const Eigen::Index n = sigma.rows();
  const Real r = Real(1) / std::sqrt(Real(2));
  const Complex<Real> i(0, 1);
  // sigma^2 = I, so e^{+-i pi/4 sigma} = (I +- i sigma) / sqrt(2).
  const Matrix<Real> id = Matrix<Real>::Identity(n, n);
  const Matrix<Real> plus = r * (id + i * sigma);
  const Matrix<Real> minus = r * (id - i * sigma);
  Matrix<Real> p0 = Matrix<Real>::Zero(2, 2), p1 = Matrix<Real>::Zero(2, 2);
  p0(0, 0) = Real(1);
  p1(1, 1) = Real(1);
  return kron<Real>(plus, p0) + kron<Real>(minus, p1);
}

/// Element 2*i + b is M_i (x) |b><b| and carries label 2*i + b; decode with
/// gradient_outcome().
template <class Real>
Povm<Real> gradient_povm(const Povm<Real>& readout) {
  std::vector<PovmElement<Real>> elements;
  for (std::size_t i = 0; i < readout.size(); ++i)
    for (int b = 0; b < 2; ++b) {
      Matrix<Real> proj = Matrix<Real>::Zero(2, 2);
      proj(b, b) = Real(1);
      elements.push_back({static_cast<int>(2 * i) + b, kron<Real>(readout[i].op, proj)});
    }
  return Povm<Real>::unchecked(std::move(elements));
}

struct GradientOutcome {
  std::size_t readout_index;
  int ancilla_bit;
};

inline GradientOutcome gradient_outcome(std::size_t element) {
  return {element / 2, static_cast<int>(element % 2)};
}

/// State on d'+1 qubits that the gradient POVM measures.
template <class Real>
DensityOperator<Real> gradient_circuit_state(const Network<Real>& net, const DensityOperator<Real>& rho,
                                             const ParameterIndex& param) {
  if (!net.contains(param)) throw DomainError("parameter index outside the network");
  const auto mid = forward_through(net, pad_for(net, rho), param.layer + 1);
  const Matrix<Real> vs = build_vs(net.parameter_operator(param));
  const auto kicked = detail::conjugate(Matrix<Real>(vs.adjoint()), attach_plus(mid));
  if (param.layer + 1 == net.layer_count()) return kicked;
  const Matrix<Real> rest = kron<Real>(layer_range_unitary(net, param.layer + 1, net.layer_count()),
                                       Matrix<Real>::Identity(2, 2));
  return detail::conjugate(rest, kicked);
}

/**
 * @brief Outcome distribution of gradient_povm() on gradient_circuit_state(),
 * indexed the same way, without building the d'+1 qubit state.
 *
 * The POVM only sees the ancilla-diagonal blocks, so
 * p(i, b) = tr(M_i W A_b^dagger rho_mid A_b W^dagger) / 2 with
 * A_0 = e^{i pi/4 sigma}, A_1 = e^{-i pi/4 sigma} and W the later layers.
 */
template <class Real>
std::vector<Real> gradient_outcome_distribution(const Network<Real>& net, const DensityOperator<Real>& rho,
                                                const ParameterIndex& param) {
  if (!net.contains(param)) throw DomainError("parameter index outside the network");
  const Matrix<Real> mid = forward_through(net, pad_for(net, rho), param.layer + 1).matrix();
  const Matrix<Real> sigma = net.parameter_operator(param);
  const Matrix<Real> w = layer_range_unitary(net, param.layer + 1, net.layer_count());
  const Real r = Real(1) / std::sqrt(Real(2));
  const Complex<Real> i(0, 1);
  const Matrix<Real> id = Matrix<Real>::Identity(sigma.rows(), sigma.cols());
  std::vector<Real> p(2 * net.readout().size());
  for (int b = 0; b < 2; ++b) {
    const Matrix<Real> k = w * (r * (id - (b == 0 ? i : -i) * sigma));  // W A_b^dagger
    const auto branch = DensityOperator<Real>::unchecked(Matrix<Real>(k * mid * k.adjoint()));
    const auto q = outcome_distribution(net.readout(), branch);
    for (std::size_t e = 0; e < q.size(); ++e) p[2 * e + static_cast<std::size_t>(b)] = q[e] / Real(2);
  }
  return p;
}

namespace detail {

template <class Real>
Real shot_value(const LossFunction<Real>& loss, int y, int y_hat, int b) {
  return Real(-2) * (b == 0 ? Real(1) : Real(-1)) * loss(y, y_hat);
}

}  // namespace detail

/// n single-shot derivative measurements, each on its own copy of `sample`.
template <class Real>
std::vector<GradientShot<Real>> sample_derivative_shots(const Network<Real>& net, const LabeledState<Real>& sample,
                                                        const ParameterIndex& param, const LossFunction<Real>& loss,
                                                        std::size_t n, Rng& rng) {
  const auto p = gradient_outcome_distribution(net, sample.rho, param);
  std::vector<GradientShot<Real>> shots;
  shots.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto outcome = gradient_outcome(sample_index<Real>(p, rng));
    const int y_hat = net.readout()[outcome.readout_index].label;
    shots.push_back({param, detail::shot_value(loss, sample.label, y_hat, outcome.ancilla_bit), y_hat,
                     outcome.ancilla_bit});
  }
  return shots;
}

/// One single-shot derivative measurement on one copy of `sample`.
template <class Real>
GradientShot<Real> measure_derivative(const Network<Real>& net, const LabeledState<Real>& sample,
                                      const ParameterIndex& param, const LossFunction<Real>& loss, Rng& rng) {
  return sample_derivative_shots(net, sample, param, loss, 1, rng).front();
}

/// E[Z] by enumerating every (y_hat, b) outcome of the gradient POVM.
template <class Real>
Real derivative_expectation(const Network<Real>& net, const LabeledState<Real>& sample, const ParameterIndex& param,
                            const LossFunction<Real>& loss) {
  const auto povm = gradient_povm(net.readout());
  const auto p = outcome_distribution(povm, gradient_circuit_state(net, sample.rho, param));
  Real mean = 0;
  for (std::size_t e = 0; e < p.size(); ++e) {
    const auto outcome = gradient_outcome(e);
    mean += p[e] * detail::shot_value(loss, sample.label, net.readout()[outcome.readout_index].label,
                                      outcome.ancilla_bit);
  }
  return mean;
}

namespace detail {

// Per-layer pieces of the commutator-form derivative for one sample:
// states after each layer and the loss observable propagated back to it.
template <class Real>
struct DerivativeCache {
  std::vector<Matrix<Real>> state_after;  // rho^mid after layer l
  std::vector<Matrix<Real>> observable;   // W_l^dagger (sum_y l(y, y_hat) M_y) W_l

  DerivativeCache(const Network<Real>& net, const LabeledState<Real>& sample, const LossFunction<Real>& loss) {
    const int layers = net.layer_count();
    std::vector<Matrix<Real>> unitaries;
    for (int l = 0; l < layers; ++l) unitaries.push_back(layer_unitary(net, l));

    Matrix<Real> rho = pad_for(net, sample.rho).matrix();
    for (int l = 0; l < layers; ++l) {
      rho = (unitaries[l] * rho * unitaries[l].adjoint()).eval();
      state_after.push_back(rho);
    }

    const auto dim = static_cast<Eigen::Index>(dimension_of(net.total_qubits()));
    Matrix<Real> obs = Matrix<Real>::Zero(dim, dim);
    for (const auto& e : net.readout().elements()) obs += loss(sample.label, e.label) * e.op;
    observable.resize(static_cast<std::size_t>(layers));
    for (int l = layers; l-- > 0;) {
      observable[static_cast<std::size_t>(l)] = obs;
      obs = (unitaries[l].adjoint() * obs * unitaries[l]).eval();
    }
  }

  Complex<Real> value(int layer, const Matrix<Real>& sigma) const {
    const auto& rho = state_after[static_cast<std::size_t>(layer)];
    const auto& obs = observable[static_cast<std::size_t>(layer)];
    const Matrix<Real> commutator = sigma * rho - rho * sigma;
    const Complex<Real> tr = (obs.array() * commutator.transpose().array()).sum();
    return Complex<Real>(0, 1) * tr;
  }
};

}  // namespace detail

/// Commutator-form derivative i sum_y l(y, y_hat) tr(M_y^prop [sigma^s, rho^mid]),
/// with the imaginary part (rounding only) discarded.
template <class Real>
Real exact_derivative(const Network<Real>& net, const LabeledState<Real>& sample, const ParameterIndex& param,
                      const LossFunction<Real>& loss) {
  const Matrix<Real> sigma = net.parameter_operator(param);
  return detail::DerivativeCache<Real>(net, sample, loss).value(param.layer, sigma).real();
}

/// exact_derivative for every parameter, in canonical order.
template <class Real>
RealVector<Real> exact_gradient(const Network<Real>& net, const LabeledState<Real>& sample,
                                const LossFunction<Real>& loss) {
  const detail::DerivativeCache<Real> cache(net, sample, loss);
  const auto indices = net.parameter_indices();
  RealVector<Real> grad(static_cast<Eigen::Index>(indices.size()));
  for (std::size_t i = 0; i < indices.size(); ++i) {
    grad[static_cast<Eigen::Index>(i)] = cache.value(indices[i].layer, net.parameter_operator(indices[i])).real();
  }
  return grad;
}

template <class Real = double>
struct CopyGradient {
  RealVector<Real> gradient;
  std::size_t copies = 0;
};

/**
 * @brief Copy-based gradient estimate: every component is the mean of n_c
 * single-shot measurements, each on a fresh copy of the sample.
 */
template <class Real>
CopyGradient<Real> approx_gradient_copies(const Network<Real>& net, const LabeledState<Real>& sample,
                                          std::size_t copies_per_component, const LossFunction<Real>& loss,
                                          Rng& rng) {
  if (copies_per_component < 1) throw DomainError("copies_per_component must be at least 1");
  const auto indices = net.parameter_indices();
  CopyGradient<Real> out{RealVector<Real>::Zero(static_cast<Eigen::Index>(indices.size())), 0};
  for (std::size_t i = 0; i < indices.size(); ++i) {
    Real sum = 0;
    for (const auto& shot : sample_derivative_shots(net, sample, indices[i], loss, copies_per_component, rng))
      sum += shot.z;
    out.gradient[static_cast<Eigen::Index>(i)] = sum / static_cast<Real>(copies_per_component);
    out.copies += copies_per_component;
  }
  return out;
}

/**
 * @brief Copies per component so that, with probability at least 1 - delta,
 * every one of `components` estimates is within eps of its mean.
 *
 * Hoeffding on shots in [-2 gamma, 2 gamma] with a union bound:
 * n >= 8 gamma^2 ln(2 components / delta) / eps^2.
 */
inline std::size_t copies_for_accuracy(double eps, double delta, std::size_t components, double gamma) {
  if (!(eps > 0 && eps < 1) || !(delta > 0 && delta < 1)) throw DomainError("eps and delta must lie in (0, 1)");
  if (components == 0) throw DomainError("no components");
  const double n = 8.0 * gamma * gamma * std::log(2.0 * static_cast<double>(components) / delta) / (eps * eps);
  return static_cast<std::size_t>(std::ceil(n));
}

inline void write_shot_csv_header(std::ostream& os) { os << "layer,perceptron,word,outcome,ancilla,z\n"; }

template <class Real>
void write_shot_csv(std::ostream& os, const GradientShot<Real>& shot) {
  os << shot.param.layer << ',' << shot.param.perceptron << ',' << shot.param.word << ',' << shot.outcome_label << ','
     << shot.ancilla_bit << ',' << shot.z << '\n';
}

}  // namespace bqnn
