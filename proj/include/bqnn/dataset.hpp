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

// Two-class state-discrimination dataset on two qubits and the
// Helstrom-optimal batch loss.
//
//   |phi_u>   = sqrt(1-u^2)|00> + u|10>           rho_1(u) = |phi_u><phi_u|,   y = -1
//   |phi_+-v> = +-sqrt(1-v^2)|01> + v|10>          rho_2(v) = mixture of both,  y = +1
//
// rho_1 is drawn with probability 1/3; u and v are uniform on [0, 1].

#pragma once

#include <cmath>
#include <iomanip>
#include <optional>
#include <ostream>
#include <span>
#include <type_traits>
#include <vector>

#include "bqnn/common.hpp"
#include "bqnn/qnn.hpp"
#include "bqnn/state.hpp"

namespace bqnn {

inline constexpr double kPureClassProbability = 1.0 / 3.0;

namespace detail {

inline void check_unit_interval(double x, const char* name) {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(name) + " must lie in [0, 1]");
}

}  // namespace detail

template <class Real = double>
PureState<Real> phi_u(Real u) {
  detail::check_unit_interval(static_cast<double>(u), "u");
  Vector<Real> a = Vector<Real>::Zero(4);
  a[0] = std::sqrt(Real(1) - u * u);  // |00>
  a[2] = u;                           // |10>
  return PureState<Real>::from_amplitudes(std::move(a));
}

/// sign > 0 gives |phi_{+v}>, otherwise |phi_{-v}>.
template <class Real = double>
PureState<Real> phi_pm_v(Real v, int sign) {
  detail::check_unit_interval(static_cast<double>(v), "v");
  Vector<Real> a = Vector<Real>::Zero(4);
  a[1] = (sign > 0 ? Real(1) : Real(-1)) * std::sqrt(Real(1) - v * v);  // |01>
  a[2] = v;                                                             // |10>
  return PureState<Real>::from_amplitudes(std::move(a));
}

template <class Real = double>
DensityOperator<Real> rho1(Real u) {
  return from_ket(phi_u(u));
}

template <class Real = double>
DensityOperator<Real> rho2(Real v) {
  Matrix<Real> m = (from_ket(phi_pm_v(v, +1)).matrix() + from_ket(phi_pm_v(v, -1)).matrix()) * Real(0.5);
  return DensityOperator<Real>::unchecked(std::move(m));
}

/// A drawn sample with the (u, v) pair that produced it.
template <class Real = double>
struct LabeledSample {
  LabeledState<Real> state;
  Real u = 0;
  Real v = 0;

  /// True for rho_1(u) (label -1), false for rho_2(v).
  bool pure_class() const { return state.label == -1; }
};

/// Draws the class, then u, then v, from `rng`.
template <class Real = double>
LabeledSample<Real> draw_sample(Rng& rng) {
  const bool pure = uniform01(rng) < kPureClassProbability;
  const Real u = static_cast<Real>(uniform01(rng));
  const Real v = static_cast<Real>(uniform01(rng));
  if (pure) return {{rho1(u), -1}, u, v};
  return {{rho2(v), +1}, u, v};
}

/**
 * @brief Minimum over all measurements of the batch-averaged expected 0-1
 * loss: (1 - || (1/m) sum_j y_j rho_j ||_1) / 2.
 */
template <class Real>
Real helstrom_optimal_loss(std::span<const LabeledState<Real>> batch) {
  if (batch.empty()) throw DomainError("empty batch");
  const auto dim = batch.front().rho.dimension();
  Matrix<Real> signed_mean = Matrix<Real>::Zero(dim, dim);
  for (const auto& s : batch) {
    if (s.label != 1 && s.label != -1) throw DomainError("Helstrom bound needs labels in {-1, +1}");
    if (s.rho.dimension() != dim) throw DomainError("batch states differ in dimension");
    signed_mean += static_cast<Real>(s.label) * s.rho.matrix();
  }
  signed_mean /= static_cast<Real>(batch.size());
  return Real(0.5) * (Real(1) - trace_norm(signed_mean));
}

template <class Real>
Real helstrom_optimal_loss(const std::vector<LabeledState<Real>>& batch) {
  return helstrom_optimal_loss(std::span<const LabeledState<Real>>(batch));
}

/// Pull-based source of training samples.
template <class Real = double>
class SampleSource {
 public:
  virtual ~SampleSource() = default;
  /// Next sample, or nullopt once exhausted.
  virtual std::optional<LabeledState<Real>> next() = 0;
};

/// Unbounded (or `limit`-bounded) stream of fresh dataset draws.
template <class Real = double>
class DiscriminationStream : public SampleSource<Real> {
 public:
  explicit DiscriminationStream(std::uint64_t seed, std::optional<std::size_t> limit = std::nullopt)
      : rng_(make_rng(seed, 0x5a3d)), limit_(limit) {}

  std::optional<LabeledState<Real>> next() override {
    if (limit_ && drawn_ >= *limit_) return std::nullopt;
    ++drawn_;
    auto s = draw_sample<Real>(rng_);
    if (log_) log_->push_back(s);
    return std::move(s.state);
  }

  /// Keep every draw (with its u, v) for replay.
  void enable_log() { log_.emplace(); }
  const std::vector<LabeledSample<Real>>& log() const { return *log_; }
  std::size_t drawn() const { return drawn_; }

 private:
  Rng rng_;
  std::optional<std::size_t> limit_;
  std::size_t drawn_ = 0;
  std::optional<std::vector<LabeledSample<Real>>> log_;
};

/// Replays a fixed list of samples once.
template <class Real = double>
class VectorSource : public SampleSource<Real> {
 public:
  explicit VectorSource(std::vector<LabeledState<Real>> samples) : samples_(std::move(samples)) {}

  std::optional<LabeledState<Real>> next() override {
    if (pos_ >= samples_.size()) return std::nullopt;
    return std::move(samples_[pos_++]);
  }

 private:
  std::vector<LabeledState<Real>> samples_;
  std::size_t pos_ = 0;
};

template <class Real>
std::vector<LabeledState<Real>> draw_batch(std::size_t m, Rng& rng) {
  std::vector<LabeledState<Real>> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(draw_sample<Real>(rng).state);
  return out;
}

/// CSV dump: index,label,u_or_v_flag,u,v (flag "u" for rho_1, "v" for rho_2).
template <class Real>
void write_dataset_csv(std::ostream& os, std::span<const LabeledSample<Real>> samples) {
  os << "index,label,u_or_v_flag,u,v\n";
  os << std::setprecision(17);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    os << i << ',' << s.state.label << ',' << (s.pure_class() ? "u" : "v") << ',' << s.u << ',' << s.v << '\n';
  }
}

}  // namespace bqnn
