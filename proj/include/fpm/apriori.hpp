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
#include <span>
#include <vector>

#include "fpm/task_runtime.hpp"
#include "fpm/types.hpp"

namespace fpm {

/// Minimum support, either a fraction of the transaction count or an absolute
/// count. An itemset is frequent when its support is >= resolve(m).
class SupportThreshold {
 public:
  /// fraction in (0, 1]; throws std::invalid_argument otherwise.
  static SupportThreshold fraction(double value);
  /// count >= 1; throws std::invalid_argument otherwise.
  static SupportThreshold absolute(Support count);

  /// ceil(fraction * m) for fractional thresholds, never below 1.
  Support resolve(std::size_t transactions) const;

  bool is_fraction() const noexcept { return is_fraction_; }
  double fraction_value() const noexcept { return fraction_; }
  Support count_value() const noexcept { return count_; }

 private:
  SupportThreshold() = default;
  bool is_fraction_ = false;
  double fraction_ = 0.0;
  Support count_ = 1;
};

struct FrequentItemset {
  Itemset items;
  Support support = 0;

  friend bool operator==(const FrequentItemset&, const FrequentItemset&) = default;
  friend auto operator<=>(const FrequentItemset&, const FrequentItemset&) = default;
};

/// Frequent k-itemsets in strict lexicographic order, in original item IDs.
struct LevelResult {
  std::size_t k = 0;
  std::vector<FrequentItemset> frequent;
  std::size_t candidates_counted = 0;
  double wall_seconds = 0.0;
};

/// True when both runs found the same itemsets with the same supports at
/// every level. Timing and candidate counts are ignored.
bool same_itemsets(std::span<const LevelResult> a, std::span<const LevelResult> b);

/// Tidlists for the frequent 1-items, with items renumbered densely.
///
/// Dense IDs follow ascending original ID, so sorted dense itemsets map to
/// sorted original itemsets and lexicographic order is preserved both ways.
class VerticalIndex {
 public:
  VerticalIndex() = default;
  VerticalIndex(std::vector<Item> original_ids, std::vector<Tidlist> tidlists);

  std::size_t size() const noexcept { return tidlists_.size(); }
  /// Throws std::out_of_range for an unknown dense ID.
  const Tidlist& tidlist(Item dense) const { return tidlists_.at(dense); }
  Item original(Item dense) const { return original_ids_.at(dense); }
  Itemset to_original(std::span<const Item> dense) const;

 private:
  std::vector<Item> original_ids_;
  std::vector<Tidlist> tidlists_;
};

struct VerticalBuild {
  VerticalIndex index;
  LevelResult level1;
};

/// One pass over db; keeps tidlists of items with support >= threshold.
VerticalBuild build_vertical(const TransactionDB& db, const SupportThreshold& minsup);

/// Prefix join: pairs of (k-1)-itemsets sharing their first k-2 items yield
/// their union. Input must be lexicographically sorted; output is too.
/// With prune, candidates with an infrequent (k-1)-subset are dropped.
std::vector<Itemset> generate_candidates(std::span<const Itemset> frequent_prev, bool prune = false);

/// Sorted intersection by linear merge.
Tidlist intersect(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);
void intersect_into(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b, Tidlist& out);

/// |tidlist(i1) n ... n tidlist(ik)|, intersecting left to right.
/// Items are dense IDs; throws std::out_of_range for IDs not in the index.
Support count_support(std::span<const Item> candidate, const VerticalIndex& index);

enum class AffinityMode { local, distributed };

struct MiningOptions {
  bool prune = false;
  /// distributed: clustered runs pin tasks to cluster_hash mod workers,
  /// other policies round-robin. local: everything goes to the spawner.
  AffinityMode affinity = AffinityMode::local;
};

/// Level-synchronous Apriori with one pool task per candidate.
/// Propagates TaskFailure from the pool.
std::vector<LevelResult> mine_parallel(const TransactionDB& db, const SupportThreshold& minsup,
                                       WorkerPool& pool, const MiningOptions& options = {});

/// Same algorithm on the calling thread; reference for the parallel path.
std::vector<LevelResult> mine_sequential(const TransactionDB& db, const SupportThreshold& minsup,
                                         const MiningOptions& options = {});

}  // namespace fpm
