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

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpm/apriori.hpp"
#include "fpm/task_runtime.hpp"
#include "fpm/types.hpp"

namespace fpm {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// FIMI text: one transaction per non-empty line, whitespace-separated
/// non-negative decimal item IDs. Rows are sorted and deduplicated.
/// Throws ParseError (1-based line) on any malformed token; never returns a
/// partial database.
TransactionDB parse_fimi(std::istream& in);
TransactionDB read_fimi_file(const std::string& path);

/// Inverse of parse_fimi for normalized databases.
void write_fimi(const TransactionDB& db, std::ostream& out);

/// "1 3 (4)" per itemset, levels in order, lexicographic within a level.
void write_itemsets(std::span<const LevelResult> levels, std::ostream& out);

struct LevelStats {
  std::size_t k = 0;
  std::size_t candidates = 0;
  std::size_t frequent = 0;
  std::size_t tasks = 0;  // 0 for level 1, which is counted without tasks
  double wall_seconds = 0.0;
};

struct StatsRecord {
  std::string dataset;
  std::string policy;
  std::size_t buckets = 0;
  std::size_t nworkers = 0;
  std::string affinity;
  std::uint64_t seed = 0;
  std::string minsup;  // as given on the command line
  Support threshold = 0;
  std::size_t transactions = 0;
  std::vector<LevelStats> levels;
  double total_wall_seconds = 0.0;
  RunMetrics metrics;
};

StatsRecord make_stats(std::span<const LevelResult> levels, const RunMetrics& metrics);

/// Writes one JSON object per record.
void write_stats(const StatsRecord& record, std::ostream& out);
nlohmann::json stats_to_json(const StatsRecord& record);

}  // namespace fpm
