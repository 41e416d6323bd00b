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

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fpm/policies.hpp"
#include "fpm/task.hpp"

namespace fpm {

struct WorkerMetrics {
  std::uint64_t tasks_executed = 0;
  std::uint64_t steal_attempts = 0;
  std::uint64_t steals_successful = 0;
  std::uint64_t tasks_stolen = 0;
  std::uint64_t tasks_failed = 0;
};

struct RunMetrics {
  std::vector<WorkerMetrics> workers;

  std::uint64_t tasks_executed() const noexcept;
  std::uint64_t steal_attempts() const noexcept;
  std::uint64_t steals_successful() const noexcept;
  std::uint64_t tasks_stolen() const noexcept;
  std::uint64_t tasks_failed() const noexcept;
};

/// One successful steal, reported to the pool's observer from the thief thread.
struct StealEvent {
  std::size_t thief;
  std::size_t victim;
  std::optional<std::size_t> bucket;
  std::size_t bucket_remaining;
  std::vector<TaskId> tasks;
};

using StealObserver = std::function<void(const StealEvent&)>;

class PoolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by wait_all after the pool drained if any task body threw.
class TaskFailure : public std::runtime_error {
 public:
  explicit TaskFailure(std::vector<std::string> messages);
  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  std::vector<std::string> messages_;
};

/// Uniform draw over [0, n) \ {self}. Requires n >= 2.
std::size_t pick_victim(std::mt19937_64& rng, std::size_t self, std::size_t n);

/// Fixed-size pool of workers, each owning one queue of the configured policy.
///
/// Tasks spawned from a worker land on that worker's queue; tasks spawned from
/// any other thread land on worker 0. An affinity attribute overrides both.
/// Idle workers steal from uniformly random victims, back off, and park until
/// the next spawn.
class WorkerPool {
 public:
  /// Throws std::invalid_argument if nworkers == 0 and PoolError if the
  /// worker threads cannot be started.
  WorkerPool(std::size_t nworkers, PolicyConfig policy, std::uint64_t seed,
             StealObserver observer = {});
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  /// Throws PoolError after shutdown, std::out_of_range for a bad affinity,
  /// and whatever the policy's put rejects (e.g. clustered without itemset).
  TaskId spawn(std::function<void()> work, TaskAttributes attrs = {});

  /// Blocks until no task is outstanding. Must not be called from a worker.
  /// Throws TaskFailure if any task threw since the previous wait_all.
  RunMetrics wait_all();

  /// Drains outstanding tasks, then stops and joins the workers. Idempotent.
  void shutdown();

  RunMetrics metrics() const;
  void reset_metrics();

  std::size_t size() const noexcept { return workers_.size(); }
  const PolicyConfig& policy() const noexcept { return policy_; }
  std::int64_t outstanding() const noexcept { return outstanding_.load(std::memory_order_acquire); }
  std::size_t parked() const noexcept { return sleepers_.load(std::memory_order_acquire); }

  /// Index of the calling thread if it is one of this pool's workers.
  std::optional<std::size_t> worker_index() const noexcept;

  /// Total tasks currently sitting in worker queues.
  std::size_t queued() const noexcept;
  std::size_t queued_on(std::size_t worker) const { return workers_.at(worker)->queue->size_hint(); }

 private:
  struct alignas(64) Worker {
    std::unique_ptr<TaskQueue> queue;
    std::mt19937_64 rng;
    std::atomic<std::uint64_t> executed{0};
    std::atomic<std::uint64_t> attempts{0};
    std::atomic<std::uint64_t> steals{0};
    std::atomic<std::uint64_t> stolen{0};
    std::atomic<std::uint64_t> failed{0};
    std::thread thread;
  };

  void worker_loop(std::size_t self);
  void execute(Worker& w, Task& task);
  void park(std::uint64_t seen_epoch);
  void stop_workers();

  PolicyConfig policy_;
  StealObserver observer_;
  std::vector<std::unique_ptr<Worker>> workers_;

  std::atomic<std::int64_t> outstanding_{0};
  std::atomic<TaskId> next_id_{1};
  std::atomic<bool> closed_{false};
  std::atomic<bool> stop_{false};

  std::atomic<std::uint64_t> epoch_{0};
  std::atomic<std::size_t> sleepers_{0};
  std::mutex park_mutex_;
  std::condition_variable park_cv_;

  std::mutex done_mutex_;
  std::condition_variable done_cv_;

  std::mutex failure_mutex_;
  std::vector<std::string> failures_;
};

}  // namespace fpm
