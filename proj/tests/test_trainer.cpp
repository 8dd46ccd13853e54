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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <vector>

#include "bqnn/trainer.hpp"

using namespace bqnn;
using Catch::Approx;

namespace {

const auto kZeroOne = LossFunction<double>::zero_one();

DensityOperator<double> ket(int qubits, std::size_t index) { return from_ket(PureState<double>::basis(qubits, index)); }

std::vector<LabeledState<double>> copies_of(const LabeledState<double>& s, std::size_t n) {
  return std::vector<LabeledState<double>>(n, s);
}

// Perceptrons with 4, 16 and 4 words.
Network<double> three_qp_network() {
  using QP = BandLimitedQP<double>;
  std::vector<Network<double>::Layer> layers = {{QP::zero({0}), QP::zero({0, 1})}, {QP::zero({1})}};
  return Network<double>(2, 2, 2, std::move(layers), ParityReadout{{0, 1}, -1, +1});
}

}  // namespace

TEST_CASE("init_parameters", "[trainer]") {
  auto net = discrimination_network<double>();
  Rng a = make_rng(91);
  init_parameters(net, a);
  const auto p = net.parameters();
  CHECK(p.size() == 48);
  CHECK(p.minCoeff() >= -1);
  CHECK(p.maxCoeff() <= 1);
  CHECK(p.cwiseAbs().minCoeff() > 0);

  auto other = discrimination_network<double>();
  Rng b = make_rng(91);
  init_parameters(other, b);
  CHECK(other.parameters() == p);
}

TEST_CASE("learning rate", "[trainer]") {
  TrainerConfig cfg;
  CHECK(cfg.learning_rate(1) == Approx(0.77));
  CHECK(cfg.learning_rate(4) == Approx(0.385));
  for (std::size_t t = 1; t < 100; ++t) CHECK(cfg.learning_rate(t + 1) < cfg.learning_rate(t));
  CHECK_THROWS_AS(cfg.learning_rate(0), DomainError);
}

TEST_CASE("TrainerConfig validation and modes", "[trainer]") {
  TrainerConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = {};
  cfg.total_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);

  for (auto m : {TrainingMode::randomized_qsgd, TrainingMode::exact_gradient, TrainingMode::copy_approx})
    CHECK(parse_training_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_training_mode("sgd"), DomainError);
}

TEST_CASE("select_parameter is uniform over perceptrons, then words", "[trainer]") {
  const auto net = three_qp_network();
  TrainerConfig cfg;
  Rng rng = make_rng(92);
  constexpr int kDraws = 100000;
  std::map<std::pair<int, int>, int> per_qp;
  std::map<std::size_t, int> words_of_big;
  for (int i = 0; i < kDraws; ++i) {
    const auto p = select_parameter(net, cfg, rng);
    REQUIRE(net.contains(p));
    ++per_qp[{p.layer, p.perceptron}];
    if (p.layer == 0 && p.perceptron == 1) ++words_of_big[p.word];
  }
  REQUIRE(per_qp.size() == 3);
  const double q = 1.0 / 3.0;
  for (const auto& [qp, n] : per_qp) CHECK(std::abs(n - kDraws * q) <= 3 * std::sqrt(kDraws * q * (1 - q)));

  const int big = per_qp[{0, 1}];
  CHECK(words_of_big.size() == 16);
  for (const auto& [w, n] : words_of_big)
    CHECK(std::abs(n - big / 16.0) <= 3.5 * std::sqrt(big * (1.0 / 16) * (15.0 / 16)));

  cfg.active_parameters = {{1, 0, 2}};
  for (int i = 0; i < 10; ++i) CHECK(select_parameter(net, cfg, rng) == ParameterIndex{1, 0, 2});
}

TEST_CASE("qsgd_step moves one coefficient by at most 2 gamma eta", "[trainer]") {
  auto net = discrimination_network<double>();
  Rng rng = make_rng(93);
  init_parameters(net, rng);
  TrainerConfig cfg;
  for (std::size_t t = 1; t <= 200; ++t) {
    const auto before = net.parameters();
    LabeledState<double> s{DensityOperator<double>::maximally_mixed(2), t % 2 ? 1 : -1};
    const auto shot = qsgd_step(net, std::move(s), t, cfg, rng);
    const auto diff = (net.parameters() - before).eval();
    CHECK(diff.cwiseAbs().maxCoeff() <= 2 * kZeroOne.bound() * cfg.learning_rate(t) + 1e-15);
    CHECK((diff.array() != 0).count() <= 1);
    const auto indices = net.parameter_indices();
    const auto k = static_cast<Eigen::Index>(std::find(indices.begin(), indices.end(), shot.param) - indices.begin());
    CHECK(diff[k] == Approx(-cfg.learning_rate(t) * shot.z).margin(1e-15));
  }

  const auto frozen = net.parameters();
  for (std::size_t t = 1; t <= 50; ++t)
    qsgd_step(net, {ket(2, 1), 1}, t, cfg, rng, LossFunction<double>::constant(0.0));
  CHECK(net.parameters() == frozen);
}

TEST_CASE("exact-gradient training follows scalar gradient descent", "[trainer]") {
  auto net = single_qubit_network<double>();
  const ParameterIndex x{0, 0, 1};
  net.parameter(x) = std::numbers::pi / 3;
  TrainerConfig cfg;
  cfg.mode = TrainingMode::exact_gradient;
  cfg.alpha = 0.5;
  cfg.total_samples = 500;
  cfg.batch_size = 100;
  cfg.active_parameters = {x};
  VectorSource<double> source(copies_of({ket(1, 0), +1}, 500));
  const auto trace = train(net, source, cfg);

  // L(a) = sin^2 a, so the oracle is a <- a - eta_t sin 2a.
  double a = std::numbers::pi / 3;
  for (std::size_t t = 1; t <= 500; ++t) a -= 0.5 / std::sqrt(double(t)) * std::sin(2 * a);
  CHECK(net.parameter(x) == Approx(a).margin(1e-10));
  CHECK(std::abs(std::remainder(net.parameter(x), std::numbers::pi)) < 0.01);
  CHECK(trace.records.size() == 5);
  CHECK(trace.records.back().expected_loss < 1e-4);
  CHECK(trace.copies_consumed == 0);
}

TEST_CASE("randomized QSGD reduces the single-qubit loss", "[trainer]") {
  auto net = single_qubit_network<double>();
  const ParameterIndex x{0, 0, 1};
  net.parameter(x) = std::numbers::pi / 3;
  TrainerConfig cfg;
  cfg.seed = 5;
  cfg.total_samples = 2000;
  cfg.active_parameters = {x};
  VectorSource<double> source(copies_of({ket(1, 0), +1}, 2000));
  const auto trace = train(net, source, cfg);
  // Starts at sin^2(pi/3) = 0.75; shot noise keeps it near, not at, zero.
  double tail = 0;
  for (std::size_t i = 10; i < 20; ++i) tail += trace.records[i].expected_loss / 10;
  CHECK(trace.records.size() == 20);
  CHECK(tail < 0.05);
}

TEST_CASE("train bookkeeping", "[trainer]") {
  TrainerConfig cfg;
  cfg.seed = 3;
  cfg.total_samples = 37;
  cfg.batch_size = 10;

  auto net = discrimination_network<double>();
  DiscriminationStream<double> stream(3);
  const auto trace = train(net, stream, cfg);
  CHECK(trace.steps == 37);
  CHECK(trace.samples_consumed == 37);
  CHECK(trace.copies_consumed == 37);
  CHECK(stream.drawn() == 37);
  REQUIRE(trace.records.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(trace.records[i].batch == i);
    CHECK(trace.records[i].optimal_loss <= trace.records[i].expected_loss + 1e-12);
  }

  auto again = discrimination_network<double>();
  DiscriminationStream<double> same(3);
  const auto repeat = train(again, same, cfg);
  CHECK(repeat.final_parameters == trace.final_parameters);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(repeat.records[i].empirical_loss == trace.records[i].empirical_loss);
    CHECK(repeat.records[i].expected_loss == trace.records[i].expected_loss);
  }

  cfg.total_samples = 1;
  cfg.batch_size = 1;
  auto single = discrimination_network<double>();
  DiscriminationStream<double> one(4);
  CHECK(train(single, one, cfg).records.size() == 1);
}

TEST_CASE("train stops on an exhausted stream", "[trainer]") {
  TrainerConfig cfg;
  cfg.total_samples = 10;
  auto net = discrimination_network<double>();
  DiscriminationStream<double> short_stream(1, 9);
  try {
    train(net, short_stream, cfg);
    FAIL("expected StreamExhausted");
  } catch (const StreamExhausted& e) {
    CHECK(e.step() == 10);
  }
}

TEST_CASE("copy-approx step accounting", "[trainer]") {
  TrainerConfig cfg;
  cfg.mode = TrainingMode::copy_approx;
  cfg.copies_per_component = 2;
  cfg.total_samples = 2 * 48 * 3 + 5;
  auto net = discrimination_network<double>();
  DiscriminationStream<double> stream(2);
  const auto trace = train(net, stream, cfg);
  CHECK(trace.steps == 3);
  CHECK(trace.samples_consumed == 3);
  CHECK(trace.copies_consumed == 2 * 48 * 3);

  cfg.total_samples = 50;
  auto small = discrimination_network<double>();
  CHECK_THROWS_AS(train(small, stream, cfg), DomainError);
}

TEST_CASE("evaluate", "[trainer]") {
  const auto net = discrimination_network<double>();
  Rng rng = make_rng(94);
  const std::vector<LabeledState<double>> batch{{ket(2, 0), -1}, {ket(2, 3), -1}, {ket(2, 1), +1}};
  const auto e = evaluate(net, batch, kZeroOne, rng, 10);
  CHECK(e.accuracy == 1.0);
  CHECK(e.expected_loss == Approx(0).margin(1e-12));
  CHECK_THROWS_AS(evaluate(net, std::vector<LabeledState<double>>{}, kZeroOne, rng), DomainError);

  const auto r = batch_metrics(net, 7, batch, kZeroOne, rng);
  CHECK(r.batch == 7);
  CHECK(r.empirical_loss == 0);
  CHECK(r.optimal_loss == Approx(0).margin(1e-12));
}
