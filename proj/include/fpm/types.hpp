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
#include <vector>

namespace fpm {

/// Item identifier as it appears in a transaction file.
using Item = std::uint32_t;

/// Sorted, duplicate-free list of items. Size k makes it a k-itemset.
using Itemset = std::vector<Item>;

/// Sorted, duplicate-free list of 0-based transaction indices.
using Tidlist = std::vector<std::uint32_t>;

using Support = std::uint64_t;

/// Horizontal transaction database. Every transaction is sorted ascending
/// without duplicates; the item universe is whatever occurs in some transaction.
struct TransactionDB {
  std::vector<Itemset> transactions;

  std::size_t size() const noexcept { return transactions.size(); }
  bool empty() const noexcept { return transactions.empty(); }

  /// Number of distinct items occurring in the database.
  std::size_t item_count() const;

  /// Builds a database from raw rows, sorting and deduplicating each row.
  static TransactionDB normalized(std::vector<Itemset> rows);

  friend bool operator==(const TransactionDB&, const TransactionDB&) = default;
};

}  // namespace fpm
