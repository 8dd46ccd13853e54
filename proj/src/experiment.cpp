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

#include "bqnn/experiment.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "bqnn/dataset.hpp"
#include "bqnn/io.hpp"

namespace bqnn {

namespace {

// Random streams derived from the experiment seed.
constexpr std::uint64_t kInitStream = 3;
constexpr std::uint64_t kTestBatchStream = 4;
constexpr std::uint64_t kTestShotStream = 5;

constexpr const char* kTraceHeader = "batch,empirical_loss,expected_loss,optimal_loss";

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::uint64_t parse_count(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v.empty() || v.front() == '-' || v.front() == '+') throw ConfigError(key + ": expected a non-negative integer");
  errno = 0;
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v.c_str(), &end, 10);
  if (errno != 0 || end != v.c_str() + v.size()) throw ConfigError(key + ": expected a non-negative integer, got '" + v + "'");
  return n;
}

double parse_double(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  errno = 0;
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (v.empty() || errno != 0 || end != v.c_str() + v.size()) throw ConfigError(key + ": expected a number, got '" + v + "'");
  return x;
}

bool parse_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

bool is_preset(const std::string& name) { return name == "stacked" || name == "crossed"; }

double tail_mean(const std::vector<BatchRecord>& records, double BatchRecord::*field, std::size_t n) {
  const std::size_t k = std::min(n, records.size());
  double sum = 0;
  for (std::size_t i = records.size() - k; i < records.size(); ++i) sum += records[i].*field;
  return k == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(k);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::string format_field(double x) { return std::isnan(x) ? "NaN" : format_real(x); }

}  // namespace

void ExperimentConfig::validate() const {
  if (total_samples < 1) throw ConfigError("total_samples must be positive");
  if (batch_size < 1) throw ConfigError("batch_size must be positive");
  if (copies_per_component < 1) throw ConfigError("copies_per_component must be positive");
  if (!(alpha > 0) || !std::isfinite(alpha)) throw ConfigError("alpha must be a positive number");
  if (architecture.empty()) throw ConfigError("architecture must not be empty");
  if (output.empty()) throw ConfigError("output must not be empty");
}

TrainerConfig ExperimentConfig::trainer_config() const {
  TrainerConfig t;
  t.alpha = alpha;
  t.total_samples = total_samples;
  t.batch_size = batch_size;
  t.seed = seed;
  t.mode = mode;
  t.copies_per_component = copies_per_component;
  return t;
}

void apply_setting(ExperimentConfig& cfg, const std::string& raw_key, const std::string& value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  if (key == "mode") {
    try {
      cfg.mode = parse_training_mode(trim(value));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "seed") {
    cfg.seed = parse_count(key, value);
  } else if (key == "total_samples") {
    cfg.total_samples = parse_count(key, value);
  } else if (key == "batch_size") {
    cfg.batch_size = parse_count(key, value);
  } else if (key == "alpha") {
    cfg.alpha = parse_double(key, value);
  } else if (key == "copies_per_component") {
    cfg.copies_per_component = parse_count(key, value);
  } else if (key == "architecture") {
    cfg.architecture = trim(value);
  } else if (key == "output") {
    cfg.output = trim(value);
  } else if (key == "dump_dataset") {
    cfg.dump_dataset = parse_bool(key, value);
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

void apply_config_file(ExperimentConfig& cfg, std::istream& is) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config " + path.string());
  apply_config_file(cfg, is);
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
  os << "mode=" << to_string(cfg.mode) << '\n'
     << "seed=" << cfg.seed << '\n'
     << "total_samples=" << cfg.total_samples << '\n'
     << "batch_size=" << cfg.batch_size << '\n'
     << "alpha=" << format_real(cfg.alpha) << '\n'
     << "copies_per_component=" << cfg.copies_per_component << '\n'
     << "architecture=" << cfg.architecture << '\n'
     << "output=" << cfg.output.string() << '\n'
     << "dump_dataset=" << (cfg.dump_dataset ? "true" : "false") << '\n';
}

Network<double> initial_network(const ExperimentConfig& cfg) {
  if (is_preset(cfg.architecture)) {
    auto net = discrimination_network<double>(parse_layout(cfg.architecture));
    Rng rng = make_rng(cfg.seed, kInitStream);
    init_parameters(net, rng);
    return net;
  }
  if (!std::filesystem::is_regular_file(cfg.architecture))
    throw ConfigError("architecture '" + cfg.architecture + "' is neither a preset nor a checkpoint file");
  Network<double> net = [&] {
    try {
      return load_network(cfg.architecture);
    } catch (const ParseError& e) {
      throw ConfigError(e.what());
    }
  }();
  if (net.sample_qubits() != 2) throw ConfigError("the dataset needs a network with 2 sample qubits");
  return net;
}

ExperimentResult run_training(const ExperimentConfig& cfg) {
  cfg.validate();
  Network<double> net = initial_network(cfg);
  const TrainerConfig tcfg = cfg.trainer_config();
  if (cfg.mode == TrainingMode::copy_approx && cfg.total_samples < cfg.copies_per_component * net.parameter_count())
    throw ConfigError("copy budget " + std::to_string(cfg.total_samples) + " is below one step's " +
                      std::to_string(cfg.copies_per_component * net.parameter_count()) + " copies");

  DiscriminationStream<double> stream(cfg.seed);
  if (cfg.dump_dataset) stream.enable_log();
  auto trace = train(net, stream, tcfg);

  Rng batch_rng = make_rng(cfg.seed, kTestBatchStream);
  Rng shot_rng = make_rng(cfg.seed, kTestShotStream);
  const auto test = draw_batch<double>(cfg.batch_size, batch_rng);
  const auto eval = evaluate(net, test, LossFunction<double>::zero_one(), shot_rng, 1);

  ExperimentSummary s;
  s.steps = trace.steps;
  s.samples_consumed = trace.samples_consumed;
  s.copies_consumed = trace.copies_consumed;
  s.parameter_count = net.parameter_count();
  s.test_accuracy = eval.accuracy;
  s.test_expected_accuracy = 1.0 - eval.expected_loss;
  s.helstrom_accuracy = 1.0 - helstrom_optimal_loss(test);
  s.final_expected_loss = tail_mean(trace.records, &BatchRecord::expected_loss, 10);
  s.final_optimal_loss = tail_mean(trace.records, &BatchRecord::optimal_loss, 10);

  ExperimentResult r{std::move(net), std::move(trace), s, {}};
  if (cfg.dump_dataset) r.dataset = stream.log();
  return r;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec) throw std::runtime_error("cannot create " + cfg.output.string() + ": " + ec.message());
  // Fail on an unwritable directory before spending time on training.
  { auto probe = open_output(cfg.output / "config.txt"); write_config(probe, cfg); }

  auto r = run_training(cfg);
  {
    auto os = open_output(cfg.output / "trace.csv");
    write_trace_csv(os, r.trace.records);
  }
  save_network(cfg.output / "checkpoint.txt", r.network);
  {
    auto os = open_output(cfg.output / "summary.txt");
    write_summary(os, cfg, r.summary);
  }
  if (cfg.dump_dataset) {
    auto os = open_output(cfg.output / "dataset.csv");
    write_dataset_csv<double>(os, r.dataset);
  }
  return r;
}

void write_trace_csv(std::ostream& os, std::span<const BatchRecord> records) {
  os << kTraceHeader << '\n';
  for (const auto& r : records)
    os << r.batch << ',' << format_real(r.empirical_loss) << ',' << format_real(r.expected_loss) << ','
       << format_real(r.optimal_loss) << '\n';
}

std::vector<BatchRecord> read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || trim(line) != kTraceHeader) throw ParseError("trace CSV: missing header");
  std::vector<BatchRecord> out;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 4) throw ParseError("trace CSV line " + std::to_string(line_no) + ": expected 4 fields");
    auto number = [&](const std::string& f) {
      if (f.empty()) return std::numeric_limits<double>::quiet_NaN();
      char* end = nullptr;
      const double x = std::strtod(f.c_str(), &end);
      if (end != f.c_str() + f.size())
        throw ParseError("trace CSV line " + std::to_string(line_no) + ": not a number: " + f);
      return x;
    };
    BatchRecord r;
    try {
      r.batch = parse_count("batch", fields[0]);
    } catch (const ConfigError&) {
      throw ParseError("trace CSV line " + std::to_string(line_no) + ": bad batch index '" + fields[0] + "'");
    }
    r.empirical_loss = number(fields[1]);
    r.expected_loss = number(fields[2]);
    r.optimal_loss = number(fields[3]);
    out.push_back(r);
  }
  return out;
}

void write_summary(std::ostream& os, const ExperimentConfig& cfg, const ExperimentSummary& s) {
  os << "mode = " << to_string(cfg.mode) << '\n'
     << "seed = " << cfg.seed << '\n'
     << "architecture = " << cfg.architecture << '\n'
     << "parameters = " << s.parameter_count << '\n'
     << "steps = " << s.steps << '\n'
     << "samples_consumed = " << s.samples_consumed << '\n'
     << "copies_consumed = " << s.copies_consumed << '\n'
     << "final_expected_loss = " << format_real(s.final_expected_loss) << '\n'
     << "final_optimal_loss = " << format_real(s.final_optimal_loss) << '\n'
     << "test_accuracy = " << format_real(s.test_accuracy) << '\n'
     << "test_expected_accuracy = " << format_real(s.test_expected_accuracy) << '\n'
     << "helstrom_accuracy = " << format_real(s.helstrom_accuracy) << '\n';
}

void emit_plot_data(const std::filesystem::path& trace_csv, const std::filesystem::path& out_dir) {
  std::ifstream is(trace_csv);
  if (!is) throw std::runtime_error("cannot read " + trace_csv.string());
  const auto records = read_trace_csv(is);
  std::filesystem::create_directories(out_dir);
  auto write_series = [&](const char* name, double BatchRecord::*field) {
    auto os = open_output(out_dir / name);
    os << "# batch " << std::filesystem::path(name).stem().string() << '\n';
    for (const auto& r : records) os << r.batch << ' ' << format_field(r.*field) << '\n';
  };
  write_series("empirical.dat", &BatchRecord::empirical_loss);
  write_series("expected.dat", &BatchRecord::expected_loss);
  write_series("optimal.dat", &BatchRecord::optimal_loss);
}

}  // namespace bqnn
