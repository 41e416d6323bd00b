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

#include "fpm/policies.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

namespace fpm {

std::uint64_t cluster_hash(std::span<const Item> itemset) {
  if (itemset.size() < 2)
    throw std::invalid_argument("cluster_hash: itemset must have at least 2 items");
  std::uint64_t h = 0;
  for (Item item : itemset.first(itemset.size() - 1)) h ^= item_hash(item);
  return h;
}

std::string_view policy_name(PolicyKind kind) noexcept {
  switch (kind) {
    case PolicyKind::cilk: return "cilk";
    case PolicyKind::fifo: return "fifo";
    case PolicyKind::lifo: return "lifo";
    case PolicyKind::priority: return "priority";
    case PolicyKind::clustered: return "clustered";
  }
  return "unknown";
}

PolicyConfig parse_policy(std::string_view name, std::size_t buckets) {
  for (PolicyKind kind : kAllPolicies) {
    if (policy_name(kind) == name) {
      if (kind == PolicyKind::clustered && !std::has_single_bit(buckets))
        throw std::invalid_argument("bucket count must be a nonzero power of two");
      return PolicyConfig{kind, buckets};
    }
  }
  throw std::invalid_argument("unknown policy '" + std::string(name) +
                              "' (expected cilk, fifo, lifo, priority or clustered)");
}

std::unique_ptr<TaskQueue> make_queue(const PolicyConfig& config) {
  switch (config.kind) {
    case PolicyKind::cilk: return std::make_unique<CilkQueue>();
    case PolicyKind::fifo: return std::make_unique<FifoQueue>();
    case PolicyKind::lifo: return std::make_unique<LifoQueue>();
    case PolicyKind::priority: return std::make_unique<PriorityQueue>();
    case PolicyKind::clustered: return std::make_unique<ClusteredQueue>(config.buckets);
  }
  throw std::invalid_argument("make_queue: bad policy");
}

// PriorityQueue

void PriorityQueue::put(Task task) {
  const auto* rank = std::get_if<std::int64_t>(&task.attrs.priority);
  std::lock_guard lock(mutex_);
  heap_.push_back(Entry{rank ? *rank : 0, next_seq_++, std::move(task)});
  std::push_heap(heap_.begin(), heap_.end(), Lower{});
  size_.fetch_add(1, std::memory_order_release);
}

std::optional<Task> PriorityQueue::pop_locked() {
  if (heap_.empty()) return std::nullopt;
  std::pop_heap(heap_.begin(), heap_.end(), Lower{});
  Task t = std::move(heap_.back().task);
  heap_.pop_back();
  size_.fetch_sub(1, std::memory_order_release);
  return t;
}

std::optional<Task> PriorityQueue::get() {
  std::lock_guard lock(mutex_);
  return pop_locked();
}

StealBatch PriorityQueue::steal() {
  StealBatch batch;
  std::lock_guard lock(mutex_);
  if (auto t = pop_locked()) batch.tasks.push_back(std::move(*t));
  return batch;
}

// ClusteredQueue

ClusteredQueue::ClusteredQueue(std::size_t buckets) {
  if (!std::has_single_bit(buckets))
    throw std::invalid_argument("bucket count must be a nonzero power of two");
  buckets_.resize(buckets);
  occupied_.assign((buckets + 63) / 64, 0);
  mask_ = buckets - 1;
}

std::size_t ClusteredQueue::bucket_of(std::span<const Item> itemset) const {
  return static_cast<std::size_t>(cluster_hash(itemset)) & mask_;
}

std::size_t ClusteredQueue::bucket_size(std::size_t bucket) const {
  std::lock_guard lock(mutex_);
  return buckets_.at(bucket).size();
}

void ClusteredQueue::mark(std::size_t bucket, bool occupied) noexcept {
  const std::uint64_t bit = std::uint64_t{1} << (bucket % 64);
  if (occupied)
    occupied_[bucket / 64] |= bit;
  else
    occupied_[bucket / 64] &= ~bit;
}

std::optional<std::size_t> ClusteredQueue::first_occupied(std::size_t from) const noexcept {
  std::size_t word = from / 64;
  if (word >= occupied_.size()) return std::nullopt;
  std::uint64_t bits = occupied_[word] & (~std::uint64_t{0} << (from % 64));
  while (true) {
    if (bits != 0) return word * 64 + static_cast<std::size_t>(std::countr_zero(bits));
    if (++word == occupied_.size()) return std::nullopt;
    bits = occupied_[word];
  }
}

void ClusteredQueue::put(Task task) {
  const auto* ref = std::get_if<const Itemset*>(&task.attrs.priority);
  if (ref == nullptr || *ref == nullptr)
    throw std::invalid_argument("clustered policy requires an itemset priority");
  const std::size_t b = bucket_of(**ref);
  std::lock_guard lock(mutex_);
  buckets_[b].push_back(std::move(task));
  mark(b, true);
  size_.fetch_add(1, std::memory_order_release);
}

std::optional<Task> ClusteredQueue::get() {
  std::lock_guard lock(mutex_);
  auto b = first_occupied(cursor_);
  if (!b) b = first_occupied(0);
  if (!b) {
    cursor_ = 0;
    return std::nullopt;
  }
  cursor_ = *b;
  auto& bucket = buckets_[*b];
  Task t = std::move(bucket.front());
  bucket.pop_front();
  if (bucket.empty()) mark(*b, false);
  if (size_.fetch_sub(1, std::memory_order_release) == 1) cursor_ = 0;
  return t;
}

StealBatch ClusteredQueue::steal() {
  StealBatch batch;
  std::lock_guard lock(mutex_);
  const auto b = first_occupied(0);
  if (!b) return batch;
  auto& bucket = buckets_[*b];
  batch.tasks.reserve(bucket.size());
  for (auto& t : bucket) batch.tasks.push_back(std::move(t));
  bucket.clear();
  mark(*b, false);
  batch.bucket = *b;
  batch.bucket_remaining = bucket.size();
  if (size_.fetch_sub(batch.tasks.size(), std::memory_order_release) == batch.tasks.size())
    cursor_ = 0;
  return batch;
}

}  // namespace fpm
