// Copyright 2026 The fpm-sched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fpm/apriori.hpp"
#include "fpm/policies.hpp"

namespace fpm::cli {

enum ExitCode : int {
  kOk = 0,
  kRuntimeError = 1,
  kUsageError = 2,
  kOutputMismatch = 3,
};

struct RunConfig {
  std::string input;
  std::optional<double> minsup;
  std::optional<std::uint64_t> minsup_count;
  std::string policy = "cilk";
  std::size_t threads = 1;
  std::size_t buckets = kDefaultBuckets;
  std::uint64_t seed = 1;
  std::size_t repeats = 5;
  std::string affinity = "local";
  std::string out;    // itemsets; empty = do not write
  std::string stats;  // JSON stats; empty = do not write
};

/// Parses the dataset, mines it once under config.policy, writes outputs.
int cmd_mine(const RunConfig& config, std::ostream& log, std::ostream& err);

/// Mines config.repeats times per policy and prints a comparison table
/// normalized to the first policy. Fails with kOutputMismatch, printing no
/// timings, if any two runs disagree on the itemsets found.
int cmd_bench(const RunConfig& config, const std::vector<std::string>& policies,
              std::ostream& log, std::ostream& err);

}  // namespace fpm::cli
