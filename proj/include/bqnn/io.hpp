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

// Plain-text network checkpoints.
//
//   bqnn-network 1
//   sample_qubits 2
//   total_qubits 4
//   bandwidth 2
//   readout parity 2 3 even -1 odd 1
//   layer
//   qp support 0 2 coefficients <4^|J| numbers>
//   qp support 1 3 coefficients ...
//   layer
//   qp support 2 3 coefficients ...
//   end
//
// Coefficients are written with 17 significant digits, so a write/read
// round trip reproduces every double exactly. Lines starting with '#' are
// ignored.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "bqnn/qnn.hpp"

namespace bqnn {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_network(std::ostream& os, const Network<double>& net);
Network<double> read_network(std::istream& is);

void save_network(const std::filesystem::path& path, const Network<double>& net);
Network<double> load_network(const std::filesystem::path& path);

/// Formats with 17 significant digits.
std::string format_real(double x);

}  // namespace bqnn
