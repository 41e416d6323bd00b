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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

void add_common(CLI::App& cmd, fpm::cli::RunConfig& cfg) {
  cmd.add_option("--input", cfg.input, "FIMI transaction file")->required()->check(CLI::ExistingFile);
  auto* frac = cmd.add_option("--minsup", cfg.minsup, "Minimum support as a fraction in (0,1]");
  auto* count = cmd.add_option("--minsup-count", cfg.minsup_count, "Minimum support as a count");
  frac->excludes(count);
  count->excludes(frac);
  cmd.add_option("--threads", cfg.threads, "Worker count")->check(CLI::PositiveNumber);
  cmd.add_option("--buckets", cfg.buckets, "Bucket count for the clustered policy (power of two)");
  cmd.add_option("--seed", cfg.seed, "Victim-selection seed");
  cmd.add_option("--affinity", cfg.affinity, "Task placement")
      ->check(CLI::IsMember({"local", "distributed"}));
  cmd.add_option("--out", cfg.out, "Write frequent itemsets here");
  cmd.add_option("--stats", cfg.stats, "Write JSON run statistics here");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Apriori frequent-itemset mining on a pluggable work-stealing runtime"};
  app.require_subcommand(1);

  fpm::cli::RunConfig mine_cfg;
  auto* mine = app.add_subcommand("mine", "Mine a dataset under one scheduling policy");
  add_common(*mine, mine_cfg);
  mine->add_option("--policy", mine_cfg.policy, "cilk, fifo, lifo, priority or clustered")
      ->check(CLI::IsMember({"cilk", "fifo", "lifo", "priority", "clustered"}));

  fpm::cli::RunConfig bench_cfg;
  std::vector<std::string> policies{"cilk", "clustered"};
  auto* bench = app.add_subcommand("bench", "Compare policies over repeated runs");
  add_common(*bench, bench_cfg);
  bench->add_option("--policies,--policy", policies, "Policies to compare; the first is the baseline")
      ->delimiter(',')
      ->check(CLI::IsMember({"cilk", "fifo", "lifo", "priority", "clustered"}));
  bench->add_option("--repeats", bench_cfg.repeats, "Runs per policy")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  if (mine->parsed()) return fpm::cli::cmd_mine(mine_cfg, std::cout, std::cerr);
  return fpm::cli::cmd_bench(bench_cfg, policies, std::cout, std::cerr);
}
