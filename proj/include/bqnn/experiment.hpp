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

// Seeded training runs on the discrimination dataset and their on-disk
// artifacts: trace CSV, checkpoint, summary and plot series.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bqnn/qnn.hpp"
#include "bqnn/trainer.hpp"

namespace bqnn {

/// Invalid configuration; the CLI maps it to exit status 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  TrainingMode mode = TrainingMode::randomized_qsgd;
  std::uint64_t seed = 1;
  std::size_t total_samples = 30000;
  std::size_t batch_size = 100;
  double alpha = 0.77;
  std::size_t copies_per_component = 1;
  // "stacked", "crossed", or a checkpoint path whose network (and
  // coefficients) is the starting point.
  std::string architecture = "stacked";
  std::filesystem::path output = "bqnn-out";
  bool dump_dataset = false;

  void validate() const;
  TrainerConfig trainer_config() const;
};

/// Applies one key=value setting. Keys use underscores or dashes
/// interchangeably (total_samples == total-samples).
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Reads a flat key=value file; blank lines and '#' comments are skipped.
void apply_config_file(ExperimentConfig& cfg, std::istream& is);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

/// Every setting as key=value lines, in a form apply_config_file accepts.
void write_config(std::ostream& os, const ExperimentConfig& cfg);

/// Starting network: a preset with coefficients uniform on [-1, 1], or a
/// loaded checkpoint as is.
Network<double> initial_network(const ExperimentConfig& cfg);

struct ExperimentSummary {
  std::size_t steps = 0;
  std::size_t samples_consumed = 0;
  std::size_t copies_consumed = 0;
  std::size_t parameter_count = 0;
  // On a fresh test batch of batch_size samples.
  double test_accuracy = 0;           // one simulated prediction per sample
  double test_expected_accuracy = 0;  // 1 - average expected 0-1 loss
  double helstrom_accuracy = 0;       // 1 - the batch's Helstrom loss
  double final_expected_loss = 0;     // mean over the last 10 training batches
  double final_optimal_loss = 0;
};

struct ExperimentResult {
  Network<double> network;
  TrainingTrace<double> trace;
  ExperimentSummary summary;
  std::vector<LabeledSample<double>> dataset;  // filled when dump_dataset is set
};

/// Trains and evaluates in memory; pure function of the config.
ExperimentResult run_training(const ExperimentConfig& cfg);

/**
 * @brief run_training() plus artifacts under cfg.output: trace.csv,
 * checkpoint.txt, summary.txt, config.txt and optionally dataset.csv.
 */
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_trace_csv(std::ostream& os, std::span<const BatchRecord> records);

/// Parses a trace CSV. Empty fields read as NaN.
std::vector<BatchRecord> read_trace_csv(std::istream& is);

void write_summary(std::ostream& os, const ExperimentConfig& cfg, const ExperimentSummary& s);

/// Writes empirical.dat, expected.dat and optimal.dat (batch, value per
/// line) into out_dir. Missing values are written as NaN, which gnuplot
/// treats as a gap.
void emit_plot_data(const std::filesystem::path& trace_csv, const std::filesystem::path& out_dir);

}  // namespace bqnn
