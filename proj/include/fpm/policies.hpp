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

#include <array>
#include <atomic>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpm/task.hpp"

namespace fpm {

/// splitmix64 finalizer. Stable across platforms and runs, so bucket
/// assignments are reproducible anywhere.
constexpr std::uint64_t item_hash(Item item) noexcept {
  std::uint64_t x = item;
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// XOR of item_hash over all but the last item. Itemsets that differ only in
/// their last item hash equal. Throws std::invalid_argument for size < 2.
std::uint64_t cluster_hash(std::span<const Item> itemset);

enum class PolicyKind { cilk, fifo, lifo, priority, clustered };

inline constexpr std::size_t kDefaultBuckets = 4096;

struct PolicyConfig {
  PolicyKind kind = PolicyKind::cilk;
  std::size_t buckets = kDefaultBuckets;  // clustered only, power of two
};

std::string_view policy_name(PolicyKind kind) noexcept;

/// Accepts cilk, fifo, lifo, priority, clustered. Throws std::invalid_argument.
PolicyConfig parse_policy(std::string_view name, std::size_t buckets = kDefaultBuckets);

inline constexpr std::array<PolicyKind, 5> kAllPolicies = {
    PolicyKind::cilk, PolicyKind::fifo, PolicyKind::lifo, PolicyKind::priority,
    PolicyKind::clustered};

/// Result of one steal. Holds at most one task except for the clustered policy.
struct StealBatch {
  std::vector<Task> tasks;
  /// Bucket the batch was taken from (clustered only).
  std::optional<std::size_t> bucket;
  /// Tasks left in that bucket right after the steal, read under the queue lock.
  std::size_t bucket_remaining = 0;

  bool empty() const noexcept { return tasks.empty(); }
};

/// Per-worker queue: one owner calls put/get, any thread may steal.
/// put may also be called by non-owners (affinity and external spawns).
class TaskQueue {
 public:
  virtual ~TaskQueue() = default;

  virtual void put(Task task) = 0;
  virtual std::optional<Task> get() = 0;
  virtual StealBatch steal() = 0;
  virtual PolicyKind kind() const noexcept = 0;

  /// Approximate number of queued tasks; exact when no operation is in flight.
  std::size_t size_hint() const noexcept { return size_.load(std::memory_order_acquire); }

 protected:
  std::atomic<std::size_t> size_{0};
};

std::unique_ptr<TaskQueue> make_queue(const PolicyConfig& config);

/// Deque with the owner on one end and thieves on the other.
/// Cilk and LIFO: owner takes newest, thief takes oldest. FIFO: the reverse.
template <PolicyKind Kind>
class DequeQueue final : public TaskQueue {
  static_assert(Kind == PolicyKind::cilk || Kind == PolicyKind::fifo ||
                Kind == PolicyKind::lifo);
  static constexpr bool kOwnerTakesNewest = Kind != PolicyKind::fifo;

 public:
  void put(Task task) override {
    std::lock_guard lock(mutex_);
    tasks_.push_back(std::move(task));
    size_.fetch_add(1, std::memory_order_release);
  }

  std::optional<Task> get() override {
    std::lock_guard lock(mutex_);
    if (tasks_.empty()) return std::nullopt;
    return take(kOwnerTakesNewest);
  }

  StealBatch steal() override {
    StealBatch batch;
    std::lock_guard lock(mutex_);
    if (!tasks_.empty()) batch.tasks.push_back(take(!kOwnerTakesNewest));
    return batch;
  }

  PolicyKind kind() const noexcept override { return Kind; }

 private:
  Task take(bool newest) {
    Task t;
    if (newest) {
      t = std::move(tasks_.back());
      tasks_.pop_back();
    } else {
      t = std::move(tasks_.front());
      tasks_.pop_front();
    }
    size_.fetch_sub(1, std::memory_order_release);
    return t;
  }

  std::mutex mutex_;
  std::deque<Task> tasks_;
};

using CilkQueue = DequeQueue<PolicyKind::cilk>;
using FifoQueue = DequeQueue<PolicyKind::fifo>;
using LifoQueue = DequeQueue<PolicyKind::lifo>;

/// Max-rank first, older first among equal ranks. Steal takes the same task
/// the owner would. Tasks without an integer rank are ranked 0.
class PriorityQueue final : public TaskQueue {
 public:
  void put(Task task) override;
  std::optional<Task> get() override;
  StealBatch steal() override;
  PolicyKind kind() const noexcept override { return PolicyKind::priority; }

 private:
  struct Entry {
    std::int64_t rank;
    std::uint64_t seq;
    Task task;
  };
  struct Lower {
    bool operator()(const Entry& a, const Entry& b) const noexcept {
      return a.rank != b.rank ? a.rank < b.rank : a.seq > b.seq;
    }
  };

  std::optional<Task> pop_locked();

  std::mutex mutex_;
  std::vector<Entry> heap_;
  std::uint64_t next_seq_ = 0;
};

/// Hash table of task buckets keyed by the (k-1)-prefix of each task's itemset.
///
/// The owner drains buckets in ascending index order, finishing one bucket
/// before moving on; the cursor only moves forward and returns to 0 once the
/// queue is empty. A thief takes the whole lowest-indexed non-empty bucket.
class ClusteredQueue final : public TaskQueue {
 public:
  /// Throws std::invalid_argument unless buckets is a nonzero power of two.
  explicit ClusteredQueue(std::size_t buckets = kDefaultBuckets);

  /// Throws std::invalid_argument if the task carries no itemset of size >= 2.
  void put(Task task) override;
  std::optional<Task> get() override;
  StealBatch steal() override;
  PolicyKind kind() const noexcept override { return PolicyKind::clustered; }

  std::size_t bucket_count() const noexcept { return buckets_.size(); }
  std::size_t bucket_of(std::span<const Item> itemset) const;
  /// Current bucket contents size (test support).
  std::size_t bucket_size(std::size_t bucket) const;

 private:
  std::optional<std::size_t> first_occupied(std::size_t from) const noexcept;
  void mark(std::size_t bucket, bool occupied) noexcept;

  mutable std::mutex mutex_;
  std::vector<std::deque<Task>> buckets_;
  std::vector<std::uint64_t> occupied_;  // one bit per bucket
  std::size_t cursor_ = 0;
  std::size_t mask_;
};

}  // namespace fpm
