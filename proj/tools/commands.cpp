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

#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "fpm/ingest.hpp"
#include "fpm/task_runtime.hpp"

namespace fpm::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Prepared {
  TransactionDB db;
  SupportThreshold minsup;
  std::string minsup_text;
  AffinityMode affinity;
  std::string dataset;
};

struct RunOutcome {
  std::vector<LevelResult> levels;
  RunMetrics metrics;
  double seconds = 0.0;
};

Prepared prepare(const RunConfig& config) {
  if (config.threads < 1) throw UsageError("--threads must be >= 1");
  if (config.repeats < 1) throw UsageError("--repeats must be >= 1");
  if (config.minsup.has_value() == config.minsup_count.has_value())
    throw UsageError("give exactly one of --minsup or --minsup-count");

  AffinityMode affinity;
  if (config.affinity == "local")
    affinity = AffinityMode::local;
  else if (config.affinity == "distributed")
    affinity = AffinityMode::distributed;
  else
    throw UsageError("--affinity must be local or distributed");

  std::optional<SupportThreshold> minsup;
  std::string text;
  try {
    if (config.minsup) {
      minsup = SupportThreshold::fraction(*config.minsup);
      std::ostringstream os;
      os << *config.minsup;
      text = os.str();
    } else {
      minsup = SupportThreshold::absolute(*config.minsup_count);
      text = "count:" + std::to_string(*config.minsup_count);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  return Prepared{read_fimi_file(config.input), *minsup, std::move(text), affinity,
                  std::filesystem::path(config.input).stem().string()};
}

PolicyConfig policy_config(const std::string& name, std::size_t buckets) {
  try {
    return parse_policy(name, buckets);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

RunOutcome run_once(const Prepared& p, const PolicyConfig& policy, std::size_t threads,
                    std::uint64_t seed) {
  WorkerPool pool(threads, policy, seed);
  pool.reset_metrics();
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  outcome.levels = mine_parallel(p.db, p.minsup, pool, MiningOptions{false, p.affinity});
  outcome.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  outcome.metrics = pool.metrics();
  return outcome;
}

StatsRecord stats_for(const RunConfig& config, const Prepared& p, const PolicyConfig& policy,
                      const RunOutcome& run, std::uint64_t seed) {
  StatsRecord r = make_stats(run.levels, run.metrics);
  r.dataset = p.dataset;
  r.policy = std::string(policy_name(policy.kind));
  r.buckets = policy.kind == PolicyKind::clustered ? policy.buckets : 0;
  r.affinity = config.affinity;
  r.seed = seed;
  r.minsup = p.minsup_text;
  r.threshold = p.minsup.resolve(p.db.size());
  r.transactions = p.db.size();
  r.total_wall_seconds = run.seconds;
  return r;
}

std::string itemsets_text(const std::vector<LevelResult>& levels) {
  std::ostringstream os;
  write_itemsets(levels, os);
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
  try {
    return fn();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
}

}  // namespace

int cmd_mine(const RunConfig& config, std::ostream& log, std::ostream& err) {
  return guarded(err, [&] {
    const PolicyConfig policy = policy_config(config.policy, config.buckets);
    const Prepared p = prepare(config);
    const RunOutcome run = run_once(p, policy, config.threads, config.seed);

    if (!config.out.empty()) write_file(config.out, itemsets_text(run.levels));
    const StatsRecord stats = stats_for(config, p, policy, run, config.seed);
    if (!config.stats.empty()) write_file(config.stats, stats_to_json(stats).dump(2) + "\n");

    std::size_t total = 0;
    for (const auto& l : run.levels) total += l.frequent.size();
    log << p.dataset << ": " << p.db.size() << " transactions, threshold " << stats.threshold
        << ", " << total << " frequent itemsets in " << run.levels.size() << " levels, "
        << std::fixed << std::setprecision(4) << run.seconds << " s (" << stats.policy << ", "
        << config.threads << " threads, " << run.metrics.steals_successful() << " steals)\n";
    return kOk;
  });
}

int cmd_bench(const RunConfig& config, const std::vector<std::string>& policies,
              std::ostream& log, std::ostream& err) {
  return guarded(err, [&]() -> int {
    if (policies.empty()) throw UsageError("no policies given");
    std::vector<PolicyConfig> configs;
    for (const auto& name : policies) configs.push_back(policy_config(name, config.buckets));
    const Prepared p = prepare(config);

    struct Row {
      PolicyConfig policy;
      std::vector<RunOutcome> runs;
      std::vector<double> seconds;
    };
    std::vector<Row> rows;
    std::string reference;
    for (const auto& policy : configs) {
      Row row{policy, {}, {}};
      for (std::size_t r = 0; r < config.repeats; ++r) {
        RunOutcome run = run_once(p, policy, config.threads, config.seed + r);
        std::string text = itemsets_text(run.levels);
        if (rows.empty() && r == 0) {
          reference = std::move(text);
        } else if (text != reference) {
          err << "output mismatch: policy " << policy_name(policy.kind) << " run " << r
              << " disagrees with " << policy_name(configs.front().kind)
              << " run 0; no timings reported\n";
          return kOutputMismatch;
        }
        row.seconds.push_back(run.seconds);
        row.runs.push_back(std::move(run));
      }
      rows.push_back(std::move(row));
    }

    if (!config.out.empty()) write_file(config.out, reference);

    auto median_of = [](const Row& row, std::uint64_t (RunMetrics::*field)() const noexcept) {
      std::vector<double> v;
      for (const auto& run : row.runs) v.push_back(static_cast<double>((run.metrics.*field)()));
      return median(std::move(v));
    };

    const double baseline = mean(rows.front().seconds);
    const std::string baseline_name(policy_name(rows.front().policy.kind));
    log << p.dataset << ": " << p.db.size() << " transactions, threshold "
        << p.minsup.resolve(p.db.size()) << ", " << config.threads << " threads, "
        << config.repeats << " runs per policy; normalized to " << baseline_name << " mean\n";
    log << std::left << std::setw(10) << "policy" << std::right << std::setw(12) << "mean_s"
        << std::setw(12) << "median_s" << std::setw(12) << "normalized" << std::setw(14)
        << "steals" << std::setw(14) << "tasks_stolen" << std::setw(16) << "steal_attempts"
        << '\n';

    nlohmann::json doc;
    doc["dataset"] = p.dataset;
    doc["baseline"] = baseline_name;
    doc["repeats"] = config.repeats;
    doc["nworkers"] = config.threads;
    doc["policies"] = nlohmann::json::array();
    for (const auto& row : rows) {
      const double m = mean(row.seconds);
      const double normalized = baseline > 0 ? m / baseline : 1.0;
      const double steals = median_of(row, &RunMetrics::steals_successful);
      const double stolen = median_of(row, &RunMetrics::tasks_stolen);
      const double attempts = median_of(row, &RunMetrics::steal_attempts);
      log << std::left << std::setw(10) << policy_name(row.policy.kind) << std::right
          << std::fixed << std::setprecision(4) << std::setw(12) << m << std::setw(12)
          << median(row.seconds) << std::setprecision(3) << std::setw(12) << normalized
          << std::setprecision(0) << std::setw(14) << steals << std::setw(14) << stolen
          << std::setw(16) << attempts << '\n';

      nlohmann::json entry;
      entry["policy"] = policy_name(row.policy.kind);
      entry["samples"] = row.seconds;
      entry["mean_seconds"] = m;
      entry["median_seconds"] = median(row.seconds);
      entry["normalized"] = normalized;
      entry["median_steals_successful"] = steals;
      entry["median_tasks_stolen"] = stolen;
      entry["median_steal_attempts"] = attempts;
      entry["runs"] = nlohmann::json::array();
      for (std::size_t r = 0; r < row.runs.size(); ++r)
        entry["runs"].push_back(
            stats_to_json(stats_for(config, p, row.policy, row.runs[r], config.seed + r)));
      doc["policies"].push_back(std::move(entry));
    }
    if (!config.stats.empty()) write_file(config.stats, doc.dump(2) + "\n");
    return kOk;
  });
}

}  // namespace fpm::cli
