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

#include "fpm/apriori.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace fpm {

SupportThreshold SupportThreshold::fraction(double value) {
  if (!(value > 0.0 && value <= 1.0))
    throw std::invalid_argument("support fraction must be in (0, 1]");
  SupportThreshold t;
  t.is_fraction_ = true;
  t.fraction_ = value;
  return t;
}

SupportThreshold SupportThreshold::absolute(Support count) {
  if (count < 1) throw std::invalid_argument("support count must be >= 1");
  SupportThreshold t;
  t.count_ = count;
  return t;
}

Support SupportThreshold::resolve(std::size_t transactions) const {
  if (!is_fraction_) return count_;
  double x = fraction_ * static_cast<double>(transactions);
  // 0.3 * 10 is 3.0000000000000004 in binary; snap products that are integral
  // up to rounding error so ceil does not overshoot by one.
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) x = nearest;
  return std::max<Support>(1, static_cast<Support>(std::ceil(x)));
}

bool same_itemsets(std::span<const LevelResult> a, std::span<const LevelResult> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i].k != b[i].k || a[i].frequent != b[i].frequent) return false;
  return true;
}

VerticalIndex::VerticalIndex(std::vector<Item> original_ids, std::vector<Tidlist> tidlists)
    : original_ids_(std::move(original_ids)), tidlists_(std::move(tidlists)) {
  if (original_ids_.size() != tidlists_.size())
    throw std::invalid_argument("VerticalIndex: id and tidlist counts differ");
}

Itemset VerticalIndex::to_original(std::span<const Item> dense) const {
  Itemset out;
  out.reserve(dense.size());
  for (Item d : dense) out.push_back(original(d));
  return out;
}

VerticalBuild build_vertical(const TransactionDB& db, const SupportThreshold& minsup) {
  const Support threshold = minsup.resolve(db.size());

  std::unordered_map<Item, Tidlist> all;
  for (std::size_t tid = 0; tid < db.size(); ++tid)
    for (Item item : db.transactions[tid]) all[item].push_back(static_cast<std::uint32_t>(tid));

  std::vector<Item> kept;
  for (const auto& [item, tids] : all)
    if (tids.size() >= threshold) kept.push_back(item);
  std::sort(kept.begin(), kept.end());

  std::vector<Tidlist> tidlists;
  tidlists.reserve(kept.size());
  LevelResult level1;
  level1.k = 1;
  level1.candidates_counted = all.size();
  for (Item item : kept) {
    auto& tids = all[item];
    level1.frequent.push_back(FrequentItemset{{item}, tids.size()});
    tidlists.push_back(std::move(tids));
  }
  return VerticalBuild{VerticalIndex(std::move(kept), std::move(tidlists)), std::move(level1)};
}

std::vector<Itemset> generate_candidates(std::span<const Itemset> frequent_prev, bool prune) {
  std::vector<Itemset> out;
  if (frequent_prev.empty()) return out;
  const std::size_t k1 = frequent_prev.front().size();
  const std::size_t prefix = k1 - 1;

  auto has_prefix_of = [prefix](const Itemset& a, const Itemset& b) {
    return std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(prefix), b.begin());
  };
  auto is_frequent = [&](const Itemset& s) {
    return std::binary_search(frequent_prev.begin(), frequent_prev.end(), s);
  };

  Itemset subset(k1);
  for (std::size_t i = 0; i < frequent_prev.size(); ++i) {
    const Itemset& a = frequent_prev[i];
    for (std::size_t j = i + 1; j < frequent_prev.size() && has_prefix_of(a, frequent_prev[j]); ++j) {
      Itemset cand = a;
      cand.push_back(frequent_prev[j].back());
      if (prune) {
        bool ok = true;
        // Dropping either of the last two items gives a or frequent_prev[j].
        for (std::size_t skip = 0; ok && skip + 2 < cand.size(); ++skip) {
          std::size_t w = 0;
          for (std::size_t p = 0; p < cand.size(); ++p)
            if (p != skip) subset[w++] = cand[p];
          ok = is_frequent(subset);
        }
        if (!ok) continue;
      }
      out.push_back(std::move(cand));
    }
  }
  return out;
}

void intersect_into(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, Tidlist& out) {
  out.clear();
  out.reserve(std::min(a.size(), b.size()));
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] < b[j]) {
      ++i;
    } else if (b[j] < a[i]) {
      ++j;
    } else {
      out.push_back(a[i]);
      ++i;
      ++j;
    }
  }
}

Tidlist intersect(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b) {
  Tidlist out;
  intersect_into(a, b, out);
  return out;
}

Support count_support(std::span<const Item> candidate, const VerticalIndex& index) {
  if (candidate.empty()) throw std::invalid_argument("count_support: empty itemset");
  if (candidate.size() == 1) return index.tidlist(candidate[0]).size();

  Tidlist acc, scratch;
  intersect_into(index.tidlist(candidate[0]), index.tidlist(candidate[1]), acc);
  for (std::size_t p = 2; p < candidate.size() && !acc.empty(); ++p) {
    intersect_into(acc, index.tidlist(candidate[p]), scratch);
    acc.swap(scratch);
  }
  return acc.size();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Shared level loop. count_level fills supports[i] for candidates[i].
template <typename CountLevel>
std::vector<LevelResult> mine_levels(const TransactionDB& db, const SupportThreshold& minsup,
                                     const MiningOptions& options, CountLevel&& count_level) {
  const Support threshold = minsup.resolve(db.size());
  std::vector<LevelResult> levels;

  auto start = Clock::now();
  VerticalBuild built = build_vertical(db, minsup);
  built.level1.wall_seconds = seconds_since(start);
  const VerticalIndex& index = built.index;

  std::vector<Itemset> frequent_dense;
  frequent_dense.reserve(index.size());
  for (Item d = 0; d < index.size(); ++d) frequent_dense.push_back({d});
  levels.push_back(std::move(built.level1));

  std::vector<Support> supports;
  for (std::size_t k = 2; !frequent_dense.empty(); ++k) {
    start = Clock::now();
    const std::vector<Itemset> candidates = generate_candidates(frequent_dense, options.prune);
    if (candidates.empty()) break;

    supports.assign(candidates.size(), 0);
    count_level(candidates, index, supports);

    LevelResult level;
    level.k = k;
    level.candidates_counted = candidates.size();
    frequent_dense.clear();
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (supports[i] < threshold) continue;
      frequent_dense.push_back(candidates[i]);
      level.frequent.push_back(FrequentItemset{index.to_original(candidates[i]), supports[i]});
    }
    level.wall_seconds = seconds_since(start);
    levels.push_back(std::move(level));
  }
  return levels;
}

}  // namespace

std::vector<LevelResult> mine_sequential(const TransactionDB& db, const SupportThreshold& minsup,
                                         const MiningOptions& options) {
  return mine_levels(db, minsup, options,
                     [](const std::vector<Itemset>& candidates, const VerticalIndex& index,
                        std::vector<Support>& supports) {
                       for (std::size_t i = 0; i < candidates.size(); ++i)
                         supports[i] = count_support(candidates[i], index);
                     });
}

std::vector<LevelResult> mine_parallel(const TransactionDB& db, const SupportThreshold& minsup,
                                       WorkerPool& pool, const MiningOptions& options) {
  const bool clustered = pool.policy().kind == PolicyKind::clustered;
  const std::size_t nworkers = pool.size();

  return mine_levels(db, minsup, options,
                     [&](const std::vector<Itemset>& candidates, const VerticalIndex& index,
                         std::vector<Support>& supports) {
                       try {
                         for (std::size_t i = 0; i < candidates.size(); ++i) {
                           const Itemset* cand = &candidates[i];
                           Support* slot = &supports[i];
                           TaskAttributes attrs{cand, std::nullopt};
                           if (options.affinity == AffinityMode::distributed)
                             attrs.affinity = clustered ? cluster_hash(*cand) % nworkers : i % nworkers;
                           pool.spawn([cand, slot, &index] { *slot = count_support(*cand, index); },
                                      std::move(attrs));
                         }
                       } catch (...) {
                         // Already-spawned tasks reference this frame's slots.
                         try {
                           pool.wait_all();
                         } catch (...) {
                         }
                         throw;
                       }
                       pool.wait_all();
                     });
}

}  // namespace fpm
