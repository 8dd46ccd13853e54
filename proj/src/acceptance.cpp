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

#include "bqnn/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "bqnn/dataset.hpp"
#include "bqnn/experiment.hpp"
#include "bqnn/gradient.hpp"
#include "bqnn/random.hpp"
#include "bqnn/trainer.hpp"

namespace bqnn::acceptance {

namespace {

using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kExactTol = 1e-10;
constexpr int kExactNetworks = 50;
constexpr double kExactBudget = 60;

constexpr std::size_t kShots = 100000;
constexpr int kShotTriples = 10;
constexpr double kShotBudget = 120;

constexpr double kFdStep = 1e-6;
constexpr double kFdTol = 1e-5;

constexpr std::size_t kHelstromBatch = 100000;
constexpr double kHelstromTarget = 0.9351;
constexpr double kHelstromTol = 0.005;
constexpr double kHelstromBudget = 60;

constexpr std::uint64_t kTrainingSeeds = 5;
constexpr double kQsgdGapTol = 0.05;
constexpr double kExactGapTol = 0.015;
constexpr double kTrainingBudget = 600;

constexpr double kEps = 0.1;
constexpr double kDelta = 0.1;

constexpr double kSlopeLow = -0.7;
constexpr double kSlopeHigh = -0.3;
constexpr int kRateSeeds = 100;

constexpr double kGaugeTol = 1e-10;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

Result make(int id, std::string name, bool passed, std::string detail, Clock::time_point start) {
  return {id, std::move(name), passed, std::move(detail), seconds_since(start)};
}

const LossFunction<double>& zero_one() {
  static const auto loss = LossFunction<double>::zero_one();
  return loss;
}

RealVector<double> output_probabilities(const Network<double>& net, const DensityOperator<double>& rho) {
  const auto p = outcome_distribution(net.readout(), output_state(net, rho));
  return Eigen::Map<const RealVector<double>>(p.data(), static_cast<Eigen::Index>(p.size()));
}

// Leaves exactly one non-identity word per perceptron, so that each
// perceptron's generator is a single Pauli string.
void single_word_generators(Network<double>& net, Rng& rng) {
  std::uniform_real_distribution<double> coeff(-1.5, 1.5);
  for (int l = 0; l < net.layer_count(); ++l)
    for (int j = 0; j < static_cast<int>(net.layers()[static_cast<std::size_t>(l)].size()); ++j) {
      auto& qp = net.qp(l, j);
      std::uniform_int_distribution<Eigen::Index> word(1, qp.coefficients().size() - 1);
      qp.coefficients().setZero();
      qp.coefficients()[word(rng)] = coeff(rng);
    }
}

}  // namespace

std::string format(const Result& r) {
  std::ostringstream os;
  os << (r.passed ? "PASS" : "FAIL") << "  " << r.id << ' ' << r.name << ": " << r.detail << " ("
     << fmt("%.1f", r.seconds) << " s)";
  return os.str();
}

Result unbiasedness_exact(std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng = make_rng(seed, 101);
  double worst = 0;
  std::size_t checked = 0;
  for (int n = 0; n < kExactNetworks; ++n) {
    const auto net = random_network<double>({}, rng);
    const auto sample = random_labeled_state(net, rng);
    for (const auto& p : net.parameter_indices()) {
      const double mean = derivative_expectation(net, sample, p, zero_one());
      const double exact = exact_derivative(net, sample, p, zero_one());
      worst = std::max(worst, std::abs(mean - exact));
      ++checked;
    }
  }
  const double t = seconds_since(start);
  const bool ok = worst <= kExactTol && t < kExactBudget;
  return make(1, "unbiasedness-exact", ok,
              "max |E[Z] - dL/da| = " + fmt("%.3g", worst) + " over " + std::to_string(checked) + " parameters of " +
                  std::to_string(kExactNetworks) + " networks (tol 1e-10, budget 60 s)",
              start);
}

Result unbiasedness_statistical(std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng = make_rng(seed, 102);
  const double gamma = zero_one().bound();
  const double tol = 3.0 * 2.0 * gamma / std::sqrt(static_cast<double>(kShots));
  double worst = 0;
  for (int n = 0; n < kShotTriples; ++n) {
    const auto net = random_network<double>({}, rng);
    const auto sample = random_labeled_state(net, rng);
    const auto indices = net.parameter_indices();
    const auto p = indices[std::uniform_int_distribution<std::size_t>(0, indices.size() - 1)(rng)];
    double sum = 0;
    for (const auto& shot : sample_derivative_shots(net, sample, p, zero_one(), kShots, rng)) sum += shot.z;
    const double mean = sum / static_cast<double>(kShots);
    worst = std::max(worst, std::abs(mean - derivative_expectation(net, sample, p, zero_one())));
  }
  const double t = seconds_since(start);
  const bool ok = worst <= tol && t < kShotBudget;
  return make(2, "unbiasedness-statistical", ok,
              "max |mean of 1e5 shots - E[Z]| = " + fmt("%.4f", worst) + " over " + std::to_string(kShotTriples) +
                  " triples (tol " + fmt("%.4f", tol) + ")",
              start);
}

Result finite_difference(std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng = make_rng(seed, 103);
  const std::vector<double> grid = {-1.2, -0.7, -0.2, 0.0, 0.3, 0.8, 1.3};

  std::vector<Network<double>> nets;
  nets.push_back(single_qubit_network<double>());
  nets.push_back(discrimination_network<double>(DiscriminationLayout::stacked));
  nets.push_back(discrimination_network<double>(DiscriminationLayout::crossed));
  RandomNetworkShape shape;
  shape.disjoint_within_layer = true;
  for (int n = 0; n < 8; ++n) nets.push_back(random_network<double>(shape, rng));

  double worst = 0;
  std::size_t checked = 0;
  for (auto& net : nets) {
    single_word_generators(net, rng);
    const auto sample = random_labeled_state(net, rng);
    auto loss_at = [&](const ParameterIndex& p, double a) {
      Network<double> probe = net;
      probe.parameter(p) = a;
      return expected_loss(probe, sample.rho, sample.label, zero_one());
    };
    for (int l = 0; l < net.layer_count(); ++l)
      for (int j = 0; j < static_cast<int>(net.layers()[static_cast<std::size_t>(l)].size()); ++j) {
        const auto& c = net.qp(l, j).coefficients();
        Eigen::Index w = 0;
        c.cwiseAbs().maxCoeff(&w);
        const ParameterIndex p{l, j, static_cast<std::size_t>(w)};
        for (double a : grid) {
          Network<double> at = net;
          at.parameter(p) = a;
          const double fd = (loss_at(p, a + kFdStep) - loss_at(p, a - kFdStep)) / (2 * kFdStep);
          worst = std::max(worst, std::abs(fd - exact_derivative(at, sample, p, zero_one())));
          ++checked;
        }
      }
  }
  return make(3, "finite-difference", worst <= kFdTol,
              "max |central difference - dL/da| = " + fmt("%.3g", worst) + " at " + std::to_string(checked) +
                  " grid points (h 1e-6, tol 1e-5)",
              start);
}

Result helstrom_oracle(std::uint64_t seed) {
  const auto start = Clock::now();
  const auto zero = DensityOperator<double>::unchecked(from_ket(PureState<double>::basis(1, 0)).matrix());
  const auto one = DensityOperator<double>::unchecked(from_ket(PureState<double>::basis(1, 1)).matrix());
  const double orthogonal = helstrom_optimal_loss(std::vector<LabeledState<double>>{{zero, +1}, {one, -1}});
  const double identical = helstrom_optimal_loss(std::vector<LabeledState<double>>{{zero, +1}, {zero, -1}});

  Rng rng = make_rng(seed, 104);
  const double accuracy = 1.0 - helstrom_optimal_loss(draw_batch<double>(kHelstromBatch, rng));
  const double t = seconds_since(start);
  const bool trivial_ok = std::abs(orthogonal) <= 1e-12 && std::abs(identical - 0.5) <= 1e-12;
  const bool ok = trivial_ok && std::abs(accuracy - kHelstromTarget) <= kHelstromTol && t < kHelstromBudget;
  return make(4, "helstrom-oracle", ok,
              "orthogonal " + fmt("%.3g", orthogonal) + ", identical " + fmt("%.6f", identical) +
                  ", optimal accuracy at m = 1e5: " + fmt("%.4f", accuracy) + " (target 0.9351 +- 0.005)",
              start);
}

Result qsgd_convergence() {
  const auto start = Clock::now();
  double gap = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= kTrainingSeeds; ++seed) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    const auto r = run_training(cfg);
    const double g = r.summary.final_expected_loss - r.summary.final_optimal_loss;
    gap += g / static_cast<double>(kTrainingSeeds);
    per_seed += (seed == 1 ? "" : " ") + fmt("%.3f", g);
  }
  const double t = seconds_since(start);
  return make(5, "qsgd-convergence", gap <= kQsgdGapTol && t < kTrainingBudget,
              "final-10-batch expected loss minus optimum, mean over 5 seeds = " + fmt("%.4f", gap) + " [" + per_seed +
                  "] (tol 0.05)",
              start);
}

Result exact_gradient_accuracy() {
  const auto start = Clock::now();
  double gap = 0;
  double acc = 0;
  double opt = 0;
  for (std::uint64_t seed = 1; seed <= kTrainingSeeds; ++seed) {
    ExperimentConfig cfg;
    cfg.seed = seed;
    cfg.mode = TrainingMode::exact_gradient;
    const auto r = run_training(cfg);
    const double n = static_cast<double>(kTrainingSeeds);
    gap += (r.summary.helstrom_accuracy - r.summary.test_expected_accuracy) / n;
    acc += r.summary.test_expected_accuracy / n;
    opt += r.summary.helstrom_accuracy / n;
  }
  const double t = seconds_since(start);
  return make(6, "exact-gradient-accuracy", gap <= kExactGapTol && t < kTrainingBudget,
              "test accuracy " + fmt("%.4f", acc) + " vs optimum " + fmt("%.4f", opt) + ", mean gap " +
                  fmt("%.4f", gap) + " over 5 seeds (tol 0.015)",
              start);
}

Result sample_accounting(std::uint64_t seed) {
  const auto start = Clock::now();
  constexpr std::size_t kSteps = 500;
  bool ok = true;
  std::ostringstream detail;

  {
    auto net = discrimination_network<double>();
    Rng init = make_rng(seed, 105);
    init_parameters(net, init);
    DiscriminationStream<double> stream(seed, kSteps);
    TrainerConfig cfg;
    cfg.seed = seed;
    cfg.total_samples = kSteps;
    const auto trace = train(net, stream, cfg);
    const bool qsgd_ok = trace.steps == kSteps && trace.samples_consumed == kSteps &&
                         trace.copies_consumed == kSteps && stream.drawn() == kSteps;
    ok = ok && qsgd_ok;
    detail << "qsgd: " << trace.steps << " steps, " << trace.samples_consumed << " samples, " << trace.copies_consumed
           << " copies";

    // One sample short must stop training rather than reuse a state.
    DiscriminationStream<double> short_stream(seed, kSteps - 1);
    bool exhausted = false;
    try {
      train(net, short_stream, cfg);
    } catch (const StreamExhausted& e) {
      exhausted = e.step() == kSteps;
    }
    ok = ok && exhausted;
    if (!exhausted) detail << " (short stream not detected)";
  }

  {
    auto net = discrimination_network<double>();
    Rng init = make_rng(seed, 106);
    init_parameters(net, init);
    const std::size_t c = net.parameter_count();
    const std::size_t n_c = copies_for_accuracy(kEps, kDelta, c, zero_one().bound());
    const std::size_t per_step = n_c * c;
    DiscriminationStream<double> stream(seed);
    TrainerConfig cfg;
    cfg.seed = seed;
    cfg.mode = TrainingMode::copy_approx;
    cfg.copies_per_component = n_c;
    cfg.total_samples = 2 * per_step + per_step / 2;
    const auto trace = train(net, stream, cfg);
    const double scale = static_cast<double>(c) / (kEps * kEps);
    const bool copy_ok = trace.steps == 2 && trace.samples_consumed == 2 && trace.copies_consumed == 2 * per_step &&
                         static_cast<double>(per_step) >= scale;
    ok = ok && copy_ok;
    detail << "; copy-approx: n_c " << n_c << " x c " << c << " = " << per_step << " copies per step (c/eps^2 "
           << fmt("%.0f", scale) << "), " << trace.copies_consumed << " copies over " << trace.steps << " steps";
  }
  return make(7, "sample-accounting", ok, detail.str(), start);
}

Result convergence_rate(std::uint64_t seed) {
  const auto start = Clock::now();
  // sigma^x coefficient on |0> with labels +1 w.p. 3/4: L(a) = 1/4 + sin^2(a) / 2,
  // convex near its minimum a = 0, with shot noise that persists there.
  const auto rho = from_ket(PureState<double>::basis(1, 0));
  const double p_plus = 0.75;
  const double optimum = 1.0 - p_plus;
  const ParameterIndex x{0, 0, 1};
  const std::vector<std::size_t> horizons = {100, 1000, 10000};

  std::vector<double> log_t;
  std::vector<double> log_gap;
  std::string gaps;
  for (std::size_t horizon : horizons) {
    double gap = 0;
    for (int s = 0; s < kRateSeeds; ++s) {
      auto net = single_qubit_network<double>();
      net.parameter(x) = std::numbers::pi / 8;
      TrainerConfig cfg;
      cfg.active_parameters = {x};
      Rng rng = make_rng(seed + static_cast<std::uint64_t>(s), 107);
      Rng labels = make_rng(seed + static_cast<std::uint64_t>(s), 108);
      double sum = 0;
      for (std::size_t t = 1; t <= horizon; ++t) {
        sum += p_plus * expected_loss(net, rho, +1, zero_one()) + (1 - p_plus) * expected_loss(net, rho, -1, zero_one()) -
               optimum;
        const int y = uniform01(labels) < p_plus ? +1 : -1;
        qsgd_step(net, LabeledState<double>{rho, y}, t, cfg, rng, zero_one());
      }
      gap += sum / static_cast<double>(horizon) / kRateSeeds;
    }
    log_t.push_back(std::log(static_cast<double>(horizon)));
    log_gap.push_back(std::log(gap));
    gaps += (gaps.empty() ? "" : " ") + fmt("%.4g", gap);
  }
  const double mx = (log_t[0] + log_t[1] + log_t[2]) / 3;
  const double my = (log_gap[0] + log_gap[1] + log_gap[2]) / 3;
  double sxy = 0;
  double sxx = 0;
  for (std::size_t i = 0; i < log_t.size(); ++i) {
    sxy += (log_t[i] - mx) * (log_gap[i] - my);
    sxx += (log_t[i] - mx) * (log_t[i] - mx);
  }
  const double slope = sxy / sxx;
  return make(8, "convergence-rate", slope >= kSlopeLow && slope <= kSlopeHigh,
              "log-log slope of the averaged optimality gap = " + fmt("%.3f", slope) + " (gaps " + gaps +
                  " at T = 1e2 1e3 1e4; want [-0.7, -0.3])",
              start);
}

Result gauge_invariance(std::uint64_t seed) {
  const auto start = Clock::now();
  Rng rng = make_rng(seed, 109);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  double worst = 0;
  std::size_t checked = 0;
  for (int n = 0; n < 30; ++n) {
    const auto net = random_network<double>({}, rng);
    std::vector<DensityOperator<double>> states;
    for (int k = 0; k < 3; ++k) states.push_back(random_density<double>(net.sample_qubits(), rng));
    std::vector<RealVector<double>> before;
    for (const auto& rho : states) before.push_back(output_probabilities(net, rho));
    for (const auto& p : net.parameter_indices()) {
      if (p.word != 0) continue;
      Network<double> moved = net;
      moved.parameter(p) += shift(rng);
      for (std::size_t k = 0; k < states.size(); ++k)
        worst = std::max(worst, (output_probabilities(moved, states[k]) - before[k]).cwiseAbs().maxCoeff());
      ++checked;
    }
  }
  return make(9, "gauge-invariance", worst <= kGaugeTol,
              "max output probability change = " + fmt("%.3g", worst) + " over " + std::to_string(checked) +
                  " identity-word shifts (tol 1e-10)",
              start);
}

std::vector<Result> run(const std::vector<int>& ids, std::uint64_t seed, std::ostream& os) {
  std::vector<int> selected = ids;
  if (selected.empty())
    for (int i = 1; i <= kCriterionCount; ++i) selected.push_back(i);
  std::vector<Result> out;
  for (int id : selected) {
    Result r;
    switch (id) {
      case 1: r = unbiasedness_exact(seed); break;
      case 2: r = unbiasedness_statistical(seed); break;
      case 3: r = finite_difference(seed); break;
      case 4: r = helstrom_oracle(seed); break;
      case 5: r = qsgd_convergence(); break;
      case 6: r = exact_gradient_accuracy(); break;
      case 7: r = sample_accounting(seed); break;
      case 8: r = convergence_rate(seed); break;
      case 9: r = gauge_invariance(seed); break;
      default: throw DomainError("no acceptance criterion " + std::to_string(id));
    }
    os << format(r) << std::endl;
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace bqnn::acceptance
