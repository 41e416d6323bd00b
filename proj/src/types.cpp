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

#include "fpm/types.hpp"

#include <algorithm>
#include <unordered_set>

namespace fpm {

std::size_t TransactionDB::item_count() const {
  std::unordered_set<Item> seen;
  for (const auto& t : transactions) seen.insert(t.begin(), t.end());
  return seen.size();
}

TransactionDB TransactionDB::normalized(std::vector<Itemset> rows) {
  for (auto& row : rows) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return TransactionDB{std::move(rows)};
}

}  // namespace fpm
