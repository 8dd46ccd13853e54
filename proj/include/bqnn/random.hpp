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

// Random states and networks for property checks.

#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "bqnn/common.hpp"
#include "bqnn/qnn.hpp"
#include "bqnn/state.hpp"

namespace bqnn {

/// Haar-distributed pure state on `qubits` qubits.
template <class Real = double>
PureState<Real> random_pure_state(int qubits, Rng& rng) {
  std::normal_distribution<double> g;
  Vector<Real> a(static_cast<Eigen::Index>(dimension_of(qubits)));
  for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = Complex<Real>(static_cast<Real>(g(rng)), static_cast<Real>(g(rng)));
  a.normalize();
  return PureState<Real>::from_amplitudes(std::move(a));
}

/// G G^dagger / tr for a complex Ginibre G; full rank almost surely.
template <class Real = double>
DensityOperator<Real> random_density(int qubits, Rng& rng) {
  std::normal_distribution<double> g;
  const auto n = static_cast<Eigen::Index>(dimension_of(qubits));
  Matrix<Real> m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex<Real>(static_cast<Real>(g(rng)), static_cast<Real>(g(rng)));
  Matrix<Real> rho = m * m.adjoint();
  rho /= rho.trace().real();
  return DensityOperator<Real>::from_matrix(Matrix<Real>((rho + rho.adjoint()) * Real(0.5)));
}

struct RandomNetworkShape {
  int max_total_qubits = 4;
  int max_layers = 2;
  int bandwidth = 2;
  int max_perceptrons_per_layer = 2;
  bool disjoint_within_layer = false;
};

/// Random register sizes, supports, parity readout and coefficients in [-1, 1].
template <class Real = double>
Network<Real> random_network(const RandomNetworkShape& shape, Rng& rng) {
  auto uniform_int = [&rng](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int total = uniform_int(1, shape.max_total_qubits);
  const int sample = uniform_int(1, total);
  const int layer_count = uniform_int(1, shape.max_layers);

  std::vector<int> qubits(static_cast<std::size_t>(total));
  std::iota(qubits.begin(), qubits.end(), 0);
  auto random_subset = [&](int size) {
    std::shuffle(qubits.begin(), qubits.end(), rng);
    return std::vector<int>(qubits.begin(), qubits.begin() + size);
  };

  std::uniform_real_distribution<double> coeff(-1.0, 1.0);
  std::vector<typename Network<Real>::Layer> layers(static_cast<std::size_t>(layer_count));
  for (auto& layer : layers) {
    const int m = uniform_int(1, shape.max_perceptrons_per_layer);
    std::shuffle(qubits.begin(), qubits.end(), rng);
    int used = 0;
    for (int j = 0; j < m; ++j) {
      const int room = shape.disjoint_within_layer ? total - used : total;
      if (room == 0) break;
      const int k = uniform_int(1, std::min(shape.bandwidth, room));
      std::vector<int> support;
      if (shape.disjoint_within_layer) {
        support.assign(qubits.begin() + used, qubits.begin() + used + k);
        used += k;
      } else {
        support = random_subset(k);
      }
      auto qp = BandLimitedQP<Real>::zero(std::move(support));
      for (Eigen::Index w = 0; w < qp.coefficients().size(); ++w) qp.coefficients()[w] = static_cast<Real>(coeff(rng));
      layer.push_back(std::move(qp));
    }
  }
  const int readout_size = uniform_int(1, std::min(2, total));
  ParityReadout readout{random_subset(readout_size), -1, +1};
  std::sort(readout.qubits.begin(), readout.qubits.end());
  return Network<Real>(sample, total, shape.bandwidth, std::move(layers), std::move(readout));
}

/// Random sample for `net` with a uniformly random label in {-1, +1}.
template <class Real = double>
LabeledState<Real> random_labeled_state(const Network<Real>& net, Rng& rng) {
  const int label = std::bernoulli_distribution(0.5)(rng) ? 1 : -1;
  return {random_density<Real>(net.sample_qubits(), rng), label};
}

}  // namespace bqnn
