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

#include "bqnn/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace bqnn {

namespace {

constexpr const char* kMagic = "bqnn-network";
constexpr int kVersion = 1;

// Next non-empty, non-comment line split into tokens; false at EOF.
bool next_line(std::istream& is, std::vector<std::string>& tokens, int& line_no) {
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    tokens.clear();
    for (std::string tok; ss >> tok;) tokens.push_back(tok);
    if (!tokens.empty()) return true;
  }
  return false;
}

[[noreturn]] void fail(int line_no, const std::string& what) {
  throw ParseError("checkpoint line " + std::to_string(line_no) + ": " + what);
}

long parse_int(const std::string& tok, int line_no) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(tok, &pos);
    if (pos != tok.size()) fail(line_no, "not an integer: " + tok);
    return v;
  } catch (const std::logic_error&) {
    fail(line_no, "not an integer: " + tok);
  }
}

double parse_real(const std::string& tok, int line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) fail(line_no, "not a number: " + tok);
    return v;
  } catch (const std::logic_error&) {
    fail(line_no, "not a number: " + tok);
  }
}

int expect_keyed_int(std::istream& is, const char* key, int& line_no) {
  std::vector<std::string> t;
  if (!next_line(is, t, line_no)) fail(line_no, std::string("missing ") + key);
  if (t.size() != 2 || t[0] != key) fail(line_no, std::string("expected '") + key + " <n>'");
  return static_cast<int>(parse_int(t[1], line_no));
}

}  // namespace

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_network(std::ostream& os, const Network<double>& net) {
  os << kMagic << ' ' << kVersion << '\n';
  os << "sample_qubits " << net.sample_qubits() << '\n';
  os << "total_qubits " << net.total_qubits() << '\n';
  os << "bandwidth " << net.bandwidth() << '\n';
  const auto& r = net.readout_spec();
  os << "readout parity";
  for (int q : r.qubits) os << ' ' << q;
  os << " even " << r.even_label << " odd " << r.odd_label << '\n';
  for (const auto& layer : net.layers()) {
    os << "layer\n";
    for (const auto& qp : layer) {
      os << "qp support";
      for (int q : qp.support()) os << ' ' << q;
      os << " coefficients";
      for (Eigen::Index i = 0; i < qp.coefficients().size(); ++i) os << ' ' << format_real(qp.coefficients()[i]);
      os << '\n';
    }
  }
  os << "end\n";
}

Network<double> read_network(std::istream& is) {
  int line_no = 0;
  std::vector<std::string> t;
  if (!next_line(is, t, line_no) || t.size() != 2 || t[0] != kMagic) fail(line_no, "missing checkpoint header");
  if (parse_int(t[1], line_no) != kVersion) fail(line_no, "unsupported checkpoint version " + t[1]);

  const int d = expect_keyed_int(is, "sample_qubits", line_no);
  const int d_total = expect_keyed_int(is, "total_qubits", line_no);
  const int k = expect_keyed_int(is, "bandwidth", line_no);

  if (!next_line(is, t, line_no) || t.size() < 2 || t[0] != "readout" || t[1] != "parity")
    fail(line_no, "expected 'readout parity ...'");
  ParityReadout readout;
  std::size_t i = 2;
  for (; i < t.size() && t[i] != "even"; ++i) readout.qubits.push_back(static_cast<int>(parse_int(t[i], line_no)));
  if (i + 4 != t.size() || t[i] != "even" || t[i + 2] != "odd") fail(line_no, "expected 'even <label> odd <label>'");
  readout.even_label = static_cast<int>(parse_int(t[i + 1], line_no));
  readout.odd_label = static_cast<int>(parse_int(t[i + 3], line_no));

  std::vector<Network<double>::Layer> layers;
  bool ended = false;
  while (next_line(is, t, line_no)) {
    if (t[0] == "end") {
      ended = true;
      break;
    }
    if (t[0] == "layer") {
      if (t.size() != 1) fail(line_no, "unexpected tokens after 'layer'");
      layers.emplace_back();
      continue;
    }
    if (t[0] != "qp") fail(line_no, "unknown record '" + t[0] + "'");
    if (layers.empty()) fail(line_no, "perceptron before the first layer");
    if (t.size() < 2 || t[1] != "support") fail(line_no, "expected 'qp support ...'");
    std::vector<int> support;
    std::size_t j = 2;
    for (; j < t.size() && t[j] != "coefficients"; ++j) support.push_back(static_cast<int>(parse_int(t[j], line_no)));
    if (j == t.size()) fail(line_no, "missing 'coefficients'");
    RealVector<double> coeffs(static_cast<Eigen::Index>(t.size() - j - 1));
    for (std::size_t c = j + 1; c < t.size(); ++c)
      coeffs[static_cast<Eigen::Index>(c - j - 1)] = parse_real(t[c], line_no);
    try {
      layers.back().emplace_back(std::move(support), std::move(coeffs));
    } catch (const DomainError& e) {
      fail(line_no, e.what());
    }
  }
  if (!ended) fail(line_no, "missing 'end'");
  try {
    return Network<double>(d, d_total, k, std::move(layers), std::move(readout));
  } catch (const DomainError& e) {
    throw ParseError(std::string("invalid network: ") + e.what());
  }
}

void save_network(const std::filesystem::path& path, const Network<double>& net) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  write_network(os, net);
  if (!os) throw std::runtime_error("error writing " + path.string());
}

Network<double> load_network(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return read_network(is);
}

}  // namespace bqnn
