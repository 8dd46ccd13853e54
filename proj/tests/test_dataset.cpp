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
#include <sstream>
#include <vector>

#include "bqnn/dataset.hpp"
#include "bqnn/random.hpp"

using namespace bqnn;
using M = Matrix<double>;
using Catch::Approx;

namespace {

int numerical_rank(const M& m) {
  Eigen::SelfAdjointEigenSolver<M> es(m);
  return static_cast<int>((es.eigenvalues().array() > 1e-10).count());
}

}  // namespace

TEST_CASE("phi_u", "[dataset]") {
  const auto a0 = phi_u(0.0).amplitudes();
  CHECK(std::abs(a0[0] - 1.0) < 1e-15);
  CHECK(a0.tail(3).isZero(0));
  const auto a1 = phi_u(1.0).amplitudes();
  CHECK(std::abs(a1[2] - 1.0) < 1e-15);
  CHECK(std::abs(a1[0]) < 1e-15);
  CHECK(phi_u(0.3).amplitudes().norm() == Approx(1).margin(1e-15));
  CHECK_THROWS_AS(phi_u(-0.1), DomainError);
  CHECK_THROWS_AS(phi_u(1.1), DomainError);
}

TEST_CASE("phi_pm_v overlap", "[dataset]") {
  for (double v : {0.0, 0.5, 1.0}) {
    const auto overlap = phi_pm_v(v, +1).amplitudes().dot(phi_pm_v(v, -1).amplitudes());
    CHECK(overlap.real() == Approx(2 * v * v - 1).margin(1e-15));
    CHECK(std::abs(overlap.imag()) < 1e-15);
  }
  CHECK_THROWS_AS(phi_pm_v(1.5, 1), DomainError);
}

TEST_CASE("rho2", "[dataset]") {
  const M r0 = rho2(0.0).matrix();
  M e01 = M::Zero(4, 4);
  e01(1, 1) = 1;
  CHECK((r0 - e01).cwiseAbs().maxCoeff() < 1e-15);
  const M r1 = rho2(1.0).matrix();
  M e10 = M::Zero(4, 4);
  e10(2, 2) = 1;
  CHECK((r1 - e10).cwiseAbs().maxCoeff() < 1e-15);

  for (int k = 0; k <= 100; ++k) {
    const double x = k / 100.0;
    const M r = rho2(x).matrix();
    CHECK(std::abs(r.trace() - 1.0) < 1e-12);
    CHECK_NOTHROW(DensityOperator<double>::from_matrix(r));
    CHECK_NOTHROW(DensityOperator<double>::from_matrix(rho1(x).matrix()));
    CHECK(numerical_rank(rho1(x).matrix()) == 1);
    CHECK(numerical_rank(r) == (k == 0 || k == 100 ? 1 : 2));
  }
}

TEST_CASE("draw_sample class frequencies and determinism", "[dataset]") {
  constexpr int kDraws = 100000;
  Rng rng = make_rng(81);
  int pure = 0;
  for (int i = 0; i < kDraws; ++i) {
    const auto s = draw_sample<double>(rng);
    pure += s.pure_class() ? 1 : 0;
    CHECK((s.state.label == -1) == s.pure_class());
  }
  const double p = 1.0 / 3.0;
  CHECK(std::abs(pure - kDraws * p) <= 3 * std::sqrt(kDraws * p * (1 - p)));

  Rng a = make_rng(82);
  Rng b = make_rng(82);
  for (int i = 0; i < 50; ++i) {
    const auto x = draw_sample<double>(a);
    const auto y = draw_sample<double>(b);
    CHECK(x.state.label == y.state.label);
    CHECK(x.u == y.u);
    CHECK(x.v == y.v);
    CHECK(x.state.rho.matrix() == y.state.rho.matrix());
  }
}

TEST_CASE("Helstrom bound trivial batches", "[dataset]") {
  const auto zero = from_ket(PureState<double>::basis(2, 0));
  const auto one = from_ket(PureState<double>::basis(2, 3));
  const std::vector<LabeledState<double>> orthogonal{{zero, -1}, {one, +1}};
  CHECK(helstrom_optimal_loss(orthogonal) == Approx(0).margin(1e-12));
  const std::vector<LabeledState<double>> identical{{zero, -1}, {zero, +1}};
  CHECK(helstrom_optimal_loss(identical) == Approx(0.5).margin(1e-12));
  const std::vector<LabeledState<double>> single{{zero, +1}};
  CHECK(helstrom_optimal_loss(single) == Approx(0).margin(1e-12));
  CHECK_THROWS_AS(helstrom_optimal_loss(std::vector<LabeledState<double>>{}), DomainError);
}

TEST_CASE("Helstrom population optimum", "[dataset]") {
  // E[y rho] = (2/3) E_v rho2(v) - (1/3) E_u rho1(u); midpoint rule in u and v.
  constexpr int kGrid = 4000;
  M mean = M::Zero(4, 4);
  for (int k = 0; k < kGrid; ++k) {
    const double x = (k + 0.5) / kGrid;
    mean += (2.0 / 3.0) * rho2(x).matrix() - (1.0 / 3.0) * rho1(x).matrix();
  }
  mean /= kGrid;
  const double accuracy = 0.5 * (1 + trace_norm(mean));
  const double closed_form = 0.5 * (1 + (4 + std::sqrt(13.0)) / 9);
  CHECK(accuracy == Approx(closed_form).margin(1e-6));
  CHECK(closed_form == Approx(0.92253).margin(1e-5));

  // Large batches concentrate on it.
  Rng rng = make_rng(83);
  const auto batch = draw_batch<double>(100000, rng);
  CHECK(1 - helstrom_optimal_loss(batch) == Approx(closed_form).margin(0.005));
}

TEST_CASE("Helstrom bound lower-bounds every network", "[dataset][property]") {
  Rng rng = make_rng(84);
  const auto loss = LossFunction<double>::zero_one();
  for (int trial = 0; trial < 20; ++trial) {
    const auto batch = draw_batch<double>(20, rng);
    auto net = discrimination_network<double>(trial % 2 ? DiscriminationLayout::crossed : DiscriminationLayout::stacked);
    std::uniform_real_distribution<double> coeff(-1, 1);
    RealVector<double> p(static_cast<Eigen::Index>(net.parameter_count()));
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] = coeff(rng);
    net.set_parameters(p);
    const double bound = helstrom_optimal_loss(batch);
    CHECK(bound <= average_expected_loss(net, batch, loss) + 1e-12);

    auto shuffled = batch;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(helstrom_optimal_loss(shuffled) == Approx(bound).margin(1e-12));
    auto flipped = batch;
    for (auto& s : flipped) s.label = -s.label;
    CHECK(helstrom_optimal_loss(flipped) == Approx(bound).margin(1e-12));
  }
}

TEST_CASE("DiscriminationStream", "[dataset]") {
  DiscriminationStream<double> limited(5, 3);
  limited.enable_log();
  int n = 0;
  while (limited.next()) ++n;
  CHECK(n == 3);
  CHECK(limited.drawn() == 3);
  CHECK(limited.log().size() == 3);
  CHECK_FALSE(limited.next());

  DiscriminationStream<double> a(9);
  DiscriminationStream<double> b(9);
  DiscriminationStream<double> c(10);
  bool differs = false;
  for (int i = 0; i < 20; ++i) {
    const auto x = a.next();
    const auto y = b.next();
    const auto z = c.next();
    CHECK(x->rho.matrix() == y->rho.matrix());
    differs = differs || x->rho.matrix() != z->rho.matrix();
  }
  CHECK(differs);

  VectorSource<double> v({{rho1(0.5), -1}});
  CHECK(v.next().has_value());
  CHECK_FALSE(v.next().has_value());
}

TEST_CASE("dataset CSV", "[dataset]") {
  std::vector<LabeledSample<double>> samples{{{rho1(0.25), -1}, 0.25, 0.5}, {{rho2(0.75), +1}, 0.125, 0.75}};
  std::ostringstream os;
  write_dataset_csv<double>(os, samples);
  CHECK(os.str() == "index,label,u_or_v_flag,u,v\n0,-1,u,0.25,0.5\n1,1,v,0.125,0.75\n");
}
