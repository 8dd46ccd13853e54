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

// End-to-end acceptance checks with pinned tolerances. Each check returns
// one result line; run_acceptance() runs a selection of them in order.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bqnn::acceptance {

struct Result {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

/// "PASS  1 unbiasedness-exact: <detail> (0.8 s)"
std::string format(const Result& r);

Result unbiasedness_exact(std::uint64_t seed);        // 1
Result unbiasedness_statistical(std::uint64_t seed);  // 2
Result finite_difference(std::uint64_t seed);         // 3
Result helstrom_oracle(std::uint64_t seed);           // 4
Result qsgd_convergence();                            // 5
Result exact_gradient_accuracy();                     // 6
Result sample_accounting(std::uint64_t seed);         // 7
Result convergence_rate(std::uint64_t seed);          // 8
Result gauge_invariance(std::uint64_t seed);          // 9

inline constexpr int kCriterionCount = 9;

/// Runs the listed criteria (all when `ids` is empty), printing each line
/// to `os` as it finishes.
std::vector<Result> run(const std::vector<int>& ids, std::uint64_t seed, std::ostream& os);

}  // namespace bqnn::acceptance
