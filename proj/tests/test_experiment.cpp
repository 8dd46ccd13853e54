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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "bqnn/experiment.hpp"
#include "bqnn/io.hpp"

using namespace bqnn;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("bqnn_test_experiment_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const fs::path& path) {
  std::ifstream is(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(is, line);) out.push_back(line);
  return out;
}

ExperimentConfig small_config(std::size_t total_samples) {
  ExperimentConfig cfg;
  cfg.total_samples = total_samples;
  cfg.seed = 11;
  return cfg;
}

}  // namespace

TEST_CASE("apply_setting", "[experiment]") {
  ExperimentConfig cfg;
  apply_setting(cfg, "mode", "exact-gradient");
  apply_setting(cfg, "total-samples", "500");
  apply_setting(cfg, "batch_size", "50");
  apply_setting(cfg, "alpha", "0.5");
  apply_setting(cfg, "seed", "42");
  apply_setting(cfg, "copies-per-component", "3");
  apply_setting(cfg, "architecture", "crossed");
  apply_setting(cfg, "output", "somewhere");
  apply_setting(cfg, "dump_dataset", "yes");
  CHECK(cfg.mode == TrainingMode::exact_gradient);
  CHECK(cfg.total_samples == 500);
  CHECK(cfg.batch_size == 50);
  CHECK(cfg.alpha == 0.5);
  CHECK(cfg.seed == 42);
  CHECK(cfg.copies_per_component == 3);
  CHECK(cfg.architecture == "crossed");
  CHECK(cfg.output == "somewhere");
  CHECK(cfg.dump_dataset);

  CHECK_THROWS_AS(apply_setting(cfg, "learning_rate", "1"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "mode", "adam"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "total_samples", "-5"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "total_samples", "12abc"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "alpha", "fast"), ConfigError);
  CHECK_THROWS_AS(apply_setting(cfg, "dump_dataset", "maybe"), ConfigError);
}

TEST_CASE("config files", "[experiment]") {
  ExperimentConfig cfg;
  std::istringstream is("# training run\n\nseed = 7\ntotal-samples=900\n  alpha = 1.5  # larger steps\n");
  apply_config_file(cfg, is);
  CHECK(cfg.seed == 7);
  CHECK(cfg.total_samples == 900);
  CHECK(cfg.alpha == 1.5);
  CHECK(cfg.batch_size == 100);

  std::ostringstream os;
  write_config(os, cfg);
  ExperimentConfig back;
  std::istringstream again(os.str());
  apply_config_file(back, again);
  std::ostringstream os2;
  write_config(os2, back);
  CHECK(os2.str() == os.str());

  std::istringstream no_equals("seed 7\n");
  CHECK_THROWS_AS(apply_config_file(cfg, no_equals), ConfigError);
  CHECK_THROWS_AS(apply_config_file(cfg, fs::path("/nonexistent/bqnn.conf")), ConfigError);
}

TEST_CASE("ExperimentConfig validation", "[experiment]") {
  ExperimentConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.batch_size = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.alpha = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.total_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("trace rows and sample accounting", "[experiment]") {
  const auto r = run_training(small_config(250));
  CHECK(r.trace.records.size() == 3);
  CHECK(r.summary.steps == 250);
  CHECK(r.summary.samples_consumed == 250);
  CHECK(r.summary.copies_consumed == 250);
  CHECK(r.summary.parameter_count == 48);
  for (const auto& rec : r.trace.records) CHECK(rec.optimal_loss <= rec.expected_loss + 1e-12);
  CHECK(r.summary.helstrom_accuracy >= r.summary.test_expected_accuracy - 1e-12);

  auto cfg = small_config(1);
  cfg.batch_size = 1;
  CHECK(run_training(cfg).trace.records.size() == 1);
}

TEST_CASE("copy-approx budget", "[experiment]") {
  auto cfg = small_config(47);
  cfg.mode = TrainingMode::copy_approx;
  CHECK_THROWS_AS(run_training(cfg), ConfigError);
  cfg.total_samples = 48 * 2;
  const auto r = run_training(cfg);
  CHECK(r.summary.steps == 2);
  CHECK(r.summary.copies_consumed == 96);
}

TEST_CASE("run_experiment artifacts are reproducible", "[experiment]") {
  auto cfg = small_config(300);
  cfg.dump_dataset = true;
  cfg.output = scratch_dir("a");
  run_experiment(cfg);
  auto other = cfg;
  other.output = scratch_dir("b");
  run_experiment(other);

  for (const char* name : {"trace.csv", "checkpoint.txt", "summary.txt", "dataset.csv", "config.txt"})
    CHECK(fs::exists(cfg.output / name));
  for (const char* name : {"trace.csv", "checkpoint.txt", "summary.txt", "dataset.csv"})
    CHECK(slurp(cfg.output / name) == slurp(other.output / name));

  CHECK(lines_of(cfg.output / "trace.csv").size() == 1 + 3);
  CHECK(lines_of(cfg.output / "dataset.csv").size() == 1 + 300);

  // The checkpoint restarts training from the trained coefficients.
  const auto trained = load_network(cfg.output / "checkpoint.txt");
  auto resumed = small_config(100);
  resumed.architecture = (cfg.output / "checkpoint.txt").string();
  CHECK(initial_network(resumed).parameters() == trained.parameters());

  fs::remove_all(cfg.output);
  fs::remove_all(other.output);
}

TEST_CASE("architectures", "[experiment]") {
  auto cfg = small_config(10);
  cfg.architecture = "crossed";
  CHECK(initial_network(cfg).readout_spec().qubits == std::vector<int>{2, 3});
  cfg.architecture = "stacked";
  const auto a = initial_network(cfg);
  CHECK(a.readout_spec().qubits == std::vector<int>{0, 1});
  CHECK(initial_network(cfg).parameters() == a.parameters());
  CHECK(a.parameters().cwiseAbs().maxCoeff() <= 1);

  cfg.architecture = "no-such-network";
  CHECK_THROWS_AS(initial_network(cfg), ConfigError);

  const auto dir = scratch_dir("arch");
  fs::create_directories(dir);
  std::vector<Network<double>::Layer> layers = {{BandLimitedQP<double>::zero({0})}};
  save_network(dir / "one.txt", Network<double>(1, 1, 1, std::move(layers), ParityReadout{{0}, -1, 1}));
  cfg.architecture = (dir / "one.txt").string();
  CHECK_THROWS_AS(initial_network(cfg), ConfigError);
  {
    std::ofstream bad(dir / "bad.txt");
    bad << "not a network\n";
  }
  cfg.architecture = (dir / "bad.txt").string();
  CHECK_THROWS_AS(initial_network(cfg), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("unwritable output directory", "[experiment]") {
  const auto dir = scratch_dir("unwritable");
  fs::create_directories(dir);
  { std::ofstream(dir / "file") << "x"; }
  auto cfg = small_config(10);
  cfg.output = dir / "file" / "out";
  CHECK_THROWS_AS(run_experiment(cfg), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("trace CSV round trip", "[experiment]") {
  const std::vector<BatchRecord> records{{0, 0.5, 0.25, 0.125}, {1, 0.1, 0.3, 0.2}};
  std::stringstream ss;
  write_trace_csv(ss, records);
  CHECK(ss.str().rfind("batch,empirical_loss,expected_loss,optimal_loss\n0,0.5,0.25,0.125\n", 0) == 0);
  const auto back = read_trace_csv(ss);
  REQUIRE(back.size() == 2);
  CHECK(back[1].batch == 1);
  CHECK(back[1].empirical_loss == 0.1);
  CHECK(back[1].expected_loss == 0.3);
  CHECK(back[1].optimal_loss == 0.2);

  std::istringstream gap("batch,empirical_loss,expected_loss,optimal_loss\n0,0.5,,0.1\n");
  const auto with_gap = read_trace_csv(gap);
  CHECK(std::isnan(with_gap[0].expected_loss));

  auto rejects = [](const std::string& text) {
    std::istringstream is(text);
    CHECK_THROWS_AS(read_trace_csv(is), ParseError);
  };
  rejects("");
  rejects("batch,loss\n0,1\n");
  rejects("batch,empirical_loss,expected_loss,optimal_loss\n0,0.5,0.2\n");
  rejects("batch,empirical_loss,expected_loss,optimal_loss\n0,0.5,0.2,abc\n");
  rejects("batch,empirical_loss,expected_loss,optimal_loss\n-1,0.5,0.2,0.1\n");
}

TEST_CASE("emit_plot_data", "[experiment]") {
  const auto dir = scratch_dir("plot");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "trace.csv");
    os << "batch,empirical_loss,expected_loss,optimal_loss\n0,0.5,0.25,0.125\n1,,0.2,0.1\n2,0.3,0.15,0.1\n";
  }
  emit_plot_data(dir / "trace.csv", dir / "plots");
  const auto empirical = lines_of(dir / "plots" / "empirical.dat");
  REQUIRE(empirical.size() == 4);
  CHECK(empirical[0] == "# batch empirical");
  CHECK(empirical[1] == "0 0.5");
  CHECK(empirical[2] == "1 NaN");
  CHECK(lines_of(dir / "plots" / "expected.dat").size() == 4);
  const auto optimal = lines_of(dir / "plots" / "optimal.dat");
  CHECK(optimal[3] == "2 0.10000000000000001");

  CHECK_THROWS(emit_plot_data(dir / "missing.csv", dir / "plots"));
  fs::remove_all(dir);
}

TEST_CASE("plot series respect the Helstrom bound", "[experiment]") {
  const auto r = run_training(small_config(400));
  const auto dir = scratch_dir("bound");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "trace.csv");
    write_trace_csv(os, r.trace.records);
  }
  emit_plot_data(dir / "trace.csv", dir);
  const auto expected = lines_of(dir / "expected.dat");
  const auto optimal = lines_of(dir / "optimal.dat");
  REQUIRE(expected.size() == 5);
  REQUIRE(optimal.size() == 5);
  for (std::size_t i = 1; i < expected.size(); ++i) {
    std::istringstream e(expected[i]);
    std::istringstream o(optimal[i]);
    std::size_t be = 0, bo = 0;
    double ve = 0, vo = 0;
    e >> be >> ve;
    o >> bo >> vo;
    CHECK(be == bo);
    CHECK(vo <= ve + 1e-12);
  }
  fs::remove_all(dir);
}
