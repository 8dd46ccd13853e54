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

// bqnn: train, export plot data, dump the dataset, run the acceptance suite.
//
// Exit status: 0 success, 1 configuration error, 2 runtime error (including
// a failed acceptance criterion).

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bqnn/acceptance.hpp"
#include "bqnn/dataset.hpp"
#include "bqnn/experiment.hpp"
#include "bqnn/io.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

struct RunFlags {
  std::optional<std::string> config;
  // (key, value) in the order the settings are applied, after the config file.
  std::vector<std::pair<std::string, std::optional<std::string>>> settings = {
      {"mode", {}},         {"seed", {}},   {"total_samples", {}}, {"batch_size", {}},  {"alpha", {}},
      {"copies_per_component", {}}, {"architecture", {}}, {"output", {}}, {"dump_dataset", {}},
  };
};

int run_command(const RunFlags& flags) {
  bqnn::ExperimentConfig cfg;
  if (flags.config) bqnn::apply_config_file(cfg, *flags.config);
  for (const auto& [key, value] : flags.settings)
    if (value) bqnn::apply_setting(cfg, key, *value);
  const auto r = bqnn::run_experiment(cfg);
  bqnn::write_summary(std::cout, cfg, r.summary);
  return 0;
}

int dataset_command(std::uint64_t seed, std::size_t count, const std::string& output) {
  if (count < 1) throw bqnn::ConfigError("count must be positive");
  bqnn::DiscriminationStream<double> stream(seed, count);
  stream.enable_log();
  while (stream.next()) {
  }
  if (output == "-") {
    bqnn::write_dataset_csv<double>(std::cout, stream.log());
    return 0;
  }
  std::ofstream os(output);
  if (!os) throw std::runtime_error("cannot write " + output);
  bqnn::write_dataset_csv<double>(os, stream.log());
  return 0;
}

int acceptance_command(std::uint64_t seed, const std::vector<int>& ids) {
  for (int id : ids)
    if (id < 1 || id > bqnn::acceptance::kCriterionCount) throw bqnn::ConfigError("no criterion " + std::to_string(id));
  const auto results = bqnn::acceptance::run(ids, seed, std::cout);
  std::size_t passed = 0;
  for (const auto& r : results) passed += r.passed ? 1 : 0;
  std::cout << passed << '/' << results.size() << " criteria passed" << std::endl;
  return passed == results.size() ? 0 : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum neural network training with single-shot gradient measurements"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Train on the discrimination dataset and write trace, checkpoint and summary");
  run->add_option("--config", run_flags.config, "Flat key=value config file, applied before the flags");
  auto setting = [&](const std::string& key) -> std::optional<std::string>& {
    for (auto& [k, v] : run_flags.settings)
      if (k == key) return v;
    throw std::logic_error("unknown setting " + key);
  };
  run->add_option("--mode", setting("mode"), "randomized-qsgd, exact-gradient or copy-approx");
  run->add_option("--seed", setting("seed"), "Seed for the data stream, initialisation and measurements");
  run->add_option("--total-samples", setting("total_samples"), "Training samples (copy budget in copy-approx)");
  run->add_option("--batch-size", setting("batch_size"), "Samples per reported batch");
  run->add_option("--alpha", setting("alpha"), "Step size scale, eta_t = alpha / sqrt(t)");
  run->add_option("--copies-per-component", setting("copies_per_component"), "Copies per gradient component");
  run->add_option("--architecture", setting("architecture"), "stacked, crossed, or a checkpoint file");
  run->add_option("--output", setting("output"), "Output directory");
  run->add_option("--dump-dataset", setting("dump_dataset"), "Also write dataset.csv (true/false)");

  std::string trace_path;
  std::string plot_dir = ".";
  auto* plot = app.add_subcommand("plot-data", "Split a trace CSV into gnuplot series files");
  plot->add_option("trace", trace_path, "Trace CSV")->required();
  plot->add_option("--output", plot_dir, "Directory for empirical.dat, expected.dat and optimal.dat");

  std::uint64_t dataset_seed = 1;
  std::size_t dataset_count = 100;
  std::string dataset_output = "-";
  auto* dataset = app.add_subcommand("dataset", "Dump the sample stream of a seed as CSV");
  dataset->add_option("--seed", dataset_seed, "Stream seed (same stream as run --seed)");
  dataset->add_option("--count", dataset_count, "Number of samples");
  dataset->add_option("--output", dataset_output, "CSV file, or - for stdout");

  std::uint64_t acceptance_seed = 2026;
  std::vector<int> criteria;
  auto* acceptance = app.add_subcommand("acceptance", "Run the acceptance criteria");
  acceptance->add_option("--seed", acceptance_seed, "Seed for the randomized checks");
  acceptance->add_option("--criterion", criteria, "Criterion number; repeat to run several (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (run->parsed()) return run_command(run_flags);
    if (plot->parsed()) {
      bqnn::emit_plot_data(trace_path, plot_dir);
      return 0;
    }
    if (dataset->parsed()) return dataset_command(dataset_seed, dataset_count, dataset_output);
    if (acceptance->parsed()) return acceptance_command(acceptance_seed, criteria);
  } catch (const bqnn::ConfigError& e) {
    std::cerr << "bqnn: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "bqnn: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
