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

// Training loops: randomized single-shot QSGD, exact-gradient descent and
// the copy-based gradient baseline.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "bqnn/common.hpp"
#include "bqnn/dataset.hpp"
#include "bqnn/gradient.hpp"
#include "bqnn/qnn.hpp"

namespace bqnn {

enum class TrainingMode { randomized_qsgd, exact_gradient, copy_approx };

inline std::string to_string(TrainingMode mode) {
  switch (mode) {
    case TrainingMode::randomized_qsgd: return "randomized-qsgd";
    case TrainingMode::exact_gradient: return "exact-gradient";
    case TrainingMode::copy_approx: return "copy-approx";
  }
  return "?";
}

inline TrainingMode parse_training_mode(const std::string& text) {
  if (text == "randomized-qsgd") return TrainingMode::randomized_qsgd;
  if (text == "exact-gradient") return TrainingMode::exact_gradient;
  if (text == "copy-approx") return TrainingMode::copy_approx;
  throw DomainError("unknown training mode: " + text);
}

struct TrainerConfig {
  double alpha = 0.77;  // eta_t = alpha / sqrt(t)
  std::size_t total_samples = 30000;
  std::size_t batch_size = 100;
  std::uint64_t seed = 0;
  TrainingMode mode = TrainingMode::randomized_qsgd;
  std::size_t copies_per_component = 1;  // copy-approx only
  // Restricts updates to these coefficients; empty means all of them.
  std::vector<ParameterIndex> active_parameters;

  void validate() const {
    if (!(alpha > 0)) throw DomainError("alpha must be positive");
    if (total_samples < 1) throw DomainError("total_samples must be at least 1");
    if (batch_size < 1) throw DomainError("batch_size must be at least 1");
    if (mode == TrainingMode::copy_approx && copies_per_component < 1)
      throw DomainError("copies_per_component must be at least 1");
  }

  double learning_rate(std::size_t t) const {
    if (t < 1) throw DomainError("step index starts at 1");
    return alpha / std::sqrt(static_cast<double>(t));
  }
};

struct BatchRecord {
  std::size_t batch = 0;
  double empirical_loss = 0;
  double expected_loss = 0;
  double optimal_loss = 0;
};

template <class Real = double>
struct TrainingTrace {
  std::vector<BatchRecord> records;
  RealVector<Real> final_parameters;
  RealVector<Real> averaged_parameters;  // mean of the iterates a^(1..T)
  std::size_t steps = 0;
  std::size_t samples_consumed = 0;  // distinct samples pulled from the stream
  std::size_t copies_consumed = 0;   // state copies measured; 0 in exact-gradient mode
};

/// Raised when the sample stream ends before training does.
class StreamExhausted : public std::runtime_error {
 public:
  explicit StreamExhausted(std::size_t step)
      : std::runtime_error("sample stream exhausted at step " + std::to_string(step)), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Every coefficient independently uniform on [-1, 1], in canonical order.
template <class Real>
void init_parameters(Network<Real>& net, Rng& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  RealVector<Real> p(static_cast<Eigen::Index>(net.parameter_count()));
  for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = static_cast<Real>(dist(rng));
  net.set_parameters(p);
}

/// Uniform perceptron, then a uniform word of it; or uniform over the
/// active set when one is configured.
template <class Real>
ParameterIndex select_parameter(const Network<Real>& net, const TrainerConfig& cfg, Rng& rng) {
  if (!cfg.active_parameters.empty()) {
    std::uniform_int_distribution<std::size_t> pick(0, cfg.active_parameters.size() - 1);
    return cfg.active_parameters[pick(rng)];
  }
  std::uniform_int_distribution<std::size_t> pick_qp(0, net.perceptron_count() - 1);
  std::size_t q = pick_qp(rng);
  int layer = 0;
  while (q >= net.layers()[static_cast<std::size_t>(layer)].size()) q -= net.layers()[static_cast<std::size_t>(layer++)].size();
  const auto& qp = net.qp(layer, static_cast<int>(q));
  std::uniform_int_distribution<std::size_t> pick_word(0, qp.word_count() - 1);
  return {layer, static_cast<int>(q), pick_word(rng)};
}

/**
 * @brief One randomized QSGD step at step index t >= 1. Consumes the sample:
 * exactly one coefficient moves, by -eta_t * z.
 */
template <class Real>
GradientShot<Real> qsgd_step(Network<Real>& net, LabeledState<Real>&& sample, std::size_t t, const TrainerConfig& cfg,
                             Rng& rng, const LossFunction<Real>& loss = LossFunction<Real>::zero_one()) {
  const Real eta = static_cast<Real>(cfg.learning_rate(t));
  const LabeledState<Real> owned = std::move(sample);
  const ParameterIndex p = select_parameter(net, cfg, rng);
  const auto shot = measure_derivative(net, owned, p, loss, rng);
  net.parameter(p) -= eta * shot.z;
  return shot;
}

template <class Real>
void apply_update(Network<Real>& net, const RealVector<Real>& grad, Real eta, const TrainerConfig& cfg) {
  if (cfg.active_parameters.empty()) {
    net.set_parameters(net.parameters() - eta * grad);
    return;
  }
  const auto indices = net.parameter_indices();
  for (std::size_t i = 0; i < indices.size(); ++i)
    for (const auto& a : cfg.active_parameters)
      if (a == indices[i]) net.parameter(a) -= eta * grad[static_cast<Eigen::Index>(i)];
}

template <class Real>
void exact_gradient_step(Network<Real>& net, const LabeledState<Real>& sample, std::size_t t, const TrainerConfig& cfg,
                         const LossFunction<Real>& loss = LossFunction<Real>::zero_one()) {
  const Real eta = static_cast<Real>(cfg.learning_rate(t));
  const RealVector<Real> grad = exact_gradient(net, sample, loss);
  apply_update(net, grad, eta, cfg);
}

template <class Real>
struct Evaluation {
  double accuracy = 0;
  double expected_loss = 0;
};

/**
 * @brief Empirical accuracy from `shots_per_sample` predictions per sample,
 * and the exact average expected loss.
 */
template <class Real>
Evaluation<Real> evaluate(const Network<Real>& net, std::type_identity_t<std::span<const LabeledState<Real>>> batch,
                          const LossFunction<Real>& loss, Rng& rng, std::size_t shots_per_sample = 1) {
  if (batch.empty()) throw DomainError("empty batch");
  if (shots_per_sample < 1) throw DomainError("shots_per_sample must be at least 1");
  const Matrix<Real> u = network_unitary(net);
  std::size_t correct = 0;
  for (const auto& s : batch) {
    const auto out = detail::conjugate(u, pad_for(net, s.rho));
    const auto p = outcome_distribution(net.readout(), out);
    for (std::size_t k = 0; k < shots_per_sample; ++k)
      if (net.readout()[sample_index<Real>(p, rng)].label == s.label) ++correct;
  }
  Evaluation<Real> e;
  e.accuracy = static_cast<double>(correct) / static_cast<double>(batch.size() * shots_per_sample);
  e.expected_loss = static_cast<double>(average_expected_loss(net, batch, loss));
  return e;
}

/// Batch metrics at the current parameters: one simulated prediction per
/// sample, the exact average expected loss, and the Helstrom optimum.
template <class Real>
BatchRecord batch_metrics(const Network<Real>& net, std::size_t index, const std::vector<LabeledState<Real>>& batch,
                          const LossFunction<Real>& loss, Rng& rng) {
  const auto e = evaluate(net, batch, loss, rng, 1);
  return {index, 1.0 - e.accuracy, e.expected_loss, static_cast<double>(helstrom_optimal_loss(batch))};
}

/**
 * @brief Runs the configured training loop over `stream`.
 *
 * randomized-qsgd: one sample per step, one shot per sample, T steps.
 * exact-gradient: one sample per step, a <- a - eta_t grad L(a, rho_t, y_t).
 * copy-approx: total_samples is the copy budget; each step uses one sample
 * measured n_c * c_QNN times, so there are total_samples / (n_c c_QNN) steps.
 *
 * Batch metrics are computed on every batch_size steps with the parameters
 * reached at the end of that batch, using a simulator-side copy of the
 * batch's states that never feeds back into training.
 */
template <class Real>
TrainingTrace<Real> train(Network<Real>& net, SampleSource<Real>& stream, const TrainerConfig& cfg,
                          const LossFunction<Real>& loss = LossFunction<Real>::zero_one()) {
  cfg.validate();
  for (const auto& a : cfg.active_parameters)
    if (!net.contains(a)) throw DomainError("active parameter outside the network");

  Rng rng = make_rng(cfg.seed, 1);
  Rng monitor_rng = make_rng(cfg.seed, 2);

  std::size_t steps = cfg.total_samples;
  std::size_t copies_per_step = 1;
  if (cfg.mode == TrainingMode::copy_approx) {
    copies_per_step = cfg.copies_per_component * net.parameter_count();
    steps = cfg.total_samples / copies_per_step;
    if (steps == 0)
      throw DomainError("copy budget " + std::to_string(cfg.total_samples) + " is below one step's " +
                        std::to_string(copies_per_step) + " copies");
  }

  TrainingTrace<Real> trace;
  trace.averaged_parameters = RealVector<Real>::Zero(static_cast<Eigen::Index>(net.parameter_count()));
  std::vector<LabeledState<Real>> batch;
  batch.reserve(cfg.batch_size);

  for (std::size_t t = 1; t <= steps; ++t) {
    auto sample = stream.next();
    if (!sample) throw StreamExhausted(t);
    ++trace.samples_consumed;
    trace.averaged_parameters += net.parameters();
    batch.push_back(*sample);  // monitoring copy

    switch (cfg.mode) {
      case TrainingMode::randomized_qsgd:
        qsgd_step(net, std::move(*sample), t, cfg, rng, loss);
        trace.copies_consumed += 1;
        break;
      case TrainingMode::exact_gradient:
        exact_gradient_step(net, *sample, t, cfg, loss);
        break;
      case TrainingMode::copy_approx: {
        const auto g = approx_gradient_copies(net, *sample, cfg.copies_per_component, loss, rng);
        apply_update(net, g.gradient, static_cast<Real>(cfg.learning_rate(t)), cfg);
        trace.copies_consumed += g.copies;
        break;
      }
    }
    ++trace.steps;

    if (batch.size() == cfg.batch_size || t == steps) {
      trace.records.push_back(batch_metrics(net, trace.records.size(), batch, loss, monitor_rng));
      batch.clear();
    }
  }
  trace.averaged_parameters /= static_cast<Real>(steps);
  trace.final_parameters = net.parameters();
  return trace;
}

}  // namespace bqnn
