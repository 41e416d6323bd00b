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

#include "fpm/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

namespace fpm {

ParseError::ParseError(std::size_t line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

TransactionDB parse_fimi(std::istream& in) {
  std::vector<Itemset> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    Itemset row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p != end) {
      if (std::isspace(static_cast<unsigned char>(*p))) {
        ++p;
        continue;
      }
      const char* tok = p;
      while (p != end && !std::isspace(static_cast<unsigned char>(*p))) ++p;
      Item value = 0;
      auto [stop, ec] = std::from_chars(tok, p, value);
      if (*tok == '-' || ec != std::errc{} || stop != p) {
        const std::string token(tok, p);
        if (ec == std::errc::result_out_of_range)
          throw ParseError(lineno, "item '" + token + "' out of range");
        throw ParseError(lineno, "expected non-negative integer item, got '" + token + "'");
      }
      row.push_back(value);
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (in.bad()) throw ParseError(lineno, "read error");
  return TransactionDB::normalized(std::move(rows));
}

TransactionDB read_fimi_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return parse_fimi(in);
}

void write_fimi(const TransactionDB& db, std::ostream& out) {
  for (const auto& t : db.transactions) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (i) out << ' ';
      out << t[i];
    }
    out << '\n';
  }
}

void write_itemsets(std::span<const LevelResult> levels, std::ostream& out) {
  for (const auto& level : levels) {
    for (const auto& f : level.frequent) {
      for (std::size_t i = 0; i < f.items.size(); ++i) {
        if (i) out << ' ';
        out << f.items[i];
      }
      out << " (" << f.support << ")\n";
    }
  }
  if (!out) throw std::runtime_error("failed writing itemsets");
}

StatsRecord make_stats(std::span<const LevelResult> levels, const RunMetrics& metrics) {
  StatsRecord r;
  for (const auto& level : levels) {
    r.levels.push_back(LevelStats{level.k, level.candidates_counted, level.frequent.size(),
                                  level.k >= 2 ? level.candidates_counted : 0, level.wall_seconds});
    r.total_wall_seconds += level.wall_seconds;
  }
  r.metrics = metrics;
  r.nworkers = metrics.workers.size();
  return r;
}

nlohmann::json stats_to_json(const StatsRecord& r) {
  using nlohmann::json;
  json levels = json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"k", l.k},
                      {"candidates", l.candidates},
                      {"frequent", l.frequent},
                      {"tasks", l.tasks},
                      {"wall_seconds", l.wall_seconds}});
  }
  json workers = json::array();
  for (std::size_t i = 0; i < r.metrics.workers.size(); ++i) {
    const auto& w = r.metrics.workers[i];
    workers.push_back({{"worker", i},
                       {"tasks_executed", w.tasks_executed},
                       {"steal_attempts", w.steal_attempts},
                       {"steals_successful", w.steals_successful},
                       {"tasks_stolen", w.tasks_stolen},
                       {"tasks_failed", w.tasks_failed}});
  }
  return json{
      {"dataset", r.dataset},
      {"policy", r.policy},
      {"buckets", r.buckets},
      {"nworkers", r.nworkers},
      {"affinity", r.affinity},
      {"seed", r.seed},
      {"minsup", r.minsup},
      {"threshold", r.threshold},
      {"transactions", r.transactions},
      {"levels", std::move(levels)},
      {"total_wall_seconds", r.total_wall_seconds},
      {"totals",
       {{"tasks_executed", r.metrics.tasks_executed()},
        {"steal_attempts", r.metrics.steal_attempts()},
        {"steals_successful", r.metrics.steals_successful()},
        {"tasks_stolen", r.metrics.tasks_stolen()},
        {"tasks_failed", r.metrics.tasks_failed()}}},
      {"workers", std::move(workers)},
  };
}

void write_stats(const StatsRecord& record, std::ostream& out) {
  out << stats_to_json(record).dump(2) << '\n';
  if (!out) throw std::runtime_error("failed writing stats");
}

}  // namespace fpm
