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

#include "fpm/task_runtime.hpp"

#include <system_error>

namespace fpm {

namespace {

thread_local const WorkerPool* tls_pool = nullptr;
thread_local std::size_t tls_index = 0;

// Spin rounds double the pause length each time; yield rounds follow; then park.
constexpr unsigned kSpinRounds = 6;
constexpr unsigned kYieldRounds = 16;

inline void cpu_relax() noexcept {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_ia32_pause();
#else
  std::this_thread::yield();
#endif
}

std::string describe(const std::exception_ptr& ep, TaskId id) {
  std::string what = "unknown exception";
  try {
    std::rethrow_exception(ep);
  } catch (const std::exception& e) {
    what = e.what();
  } catch (...) {
  }
  return "task " + std::to_string(id) + ": " + what;
}

std::string join_messages(const std::vector<std::string>& messages) {
  std::string out = std::to_string(messages.size()) + " task(s) failed";
  if (!messages.empty()) out += "; first: " + messages.front();
  return out;
}

}  // namespace

#define FPM_SUM_FIELD(field)                            \
  std::uint64_t RunMetrics::field() const noexcept {    \
    std::uint64_t total = 0;                            \
    for (const auto& w : workers) total += w.field;     \
    return total;                                       \
  }
FPM_SUM_FIELD(tasks_executed)
FPM_SUM_FIELD(steal_attempts)
FPM_SUM_FIELD(steals_successful)
FPM_SUM_FIELD(tasks_stolen)
FPM_SUM_FIELD(tasks_failed)
#undef FPM_SUM_FIELD

TaskFailure::TaskFailure(std::vector<std::string> messages)
    : std::runtime_error(join_messages(messages)), messages_(std::move(messages)) {}

std::size_t pick_victim(std::mt19937_64& rng, std::size_t self, std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 2);
  const std::size_t r = dist(rng);
  return r >= self ? r + 1 : r;
}

WorkerPool::WorkerPool(std::size_t nworkers, PolicyConfig policy, std::uint64_t seed,
                       StealObserver observer)
    : policy_(policy), observer_(std::move(observer)) {
  if (nworkers == 0) throw std::invalid_argument("worker pool needs at least one worker");

  workers_.reserve(nworkers);
  for (std::size_t i = 0; i < nworkers; ++i) {
    auto w = std::make_unique<Worker>();
    w->queue = make_queue(policy_);
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(i)};
    w->rng.seed(seq);
    workers_.push_back(std::move(w));
  }

  try {
    for (std::size_t i = 0; i < nworkers; ++i)
      workers_[i]->thread = std::thread([this, i] { worker_loop(i); });
  } catch (const std::system_error& e) {
    closed_ = true;
    stop_workers();
    throw PoolError(std::string("failed to start worker threads: ") + e.what());
  }
}

WorkerPool::~WorkerPool() {
  try {
    shutdown();
  } catch (...) {
    // Failures were never collected by a wait_all; nothing left to report to.
  }
}

std::optional<std::size_t> WorkerPool::worker_index() const noexcept {
  if (tls_pool == this) return tls_index;
  return std::nullopt;
}

std::size_t WorkerPool::queued() const noexcept {
  std::size_t total = 0;
  for (const auto& w : workers_) total += w->queue->size_hint();
  return total;
}

TaskId WorkerPool::spawn(std::function<void()> work, TaskAttributes attrs) {
  if (closed_.load(std::memory_order_acquire)) throw PoolError("spawn after shutdown");
  if (attrs.affinity && *attrs.affinity >= workers_.size())
    throw std::out_of_range("task affinity " + std::to_string(*attrs.affinity) +
                            " out of range for " + std::to_string(workers_.size()) + " workers");

  std::size_t target = 0;
  if (attrs.affinity)
    target = *attrs.affinity;
  else if (tls_pool == this)
    target = tls_index;

  const TaskId id = next_id_.fetch_add(1, std::memory_order_relaxed);
  outstanding_.fetch_add(1, std::memory_order_acq_rel);
  try {
    workers_[target]->queue->put(Task{std::move(work), std::move(attrs), id});
  } catch (...) {
    if (outstanding_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
      std::lock_guard lock(done_mutex_);
      done_cv_.notify_all();
    }
    throw;
  }

  epoch_.fetch_add(1, std::memory_order_seq_cst);
  if (sleepers_.load(std::memory_order_seq_cst) > 0) {
    { std::lock_guard lock(park_mutex_); }
    park_cv_.notify_one();
  }
  return id;
}

RunMetrics WorkerPool::wait_all() {
  if (tls_pool == this) throw std::logic_error("wait_all called from a pool worker");

  for (int i = 0; i < 1024 && outstanding_.load(std::memory_order_acquire) != 0; ++i) cpu_relax();
  {
    std::unique_lock lock(done_mutex_);
    done_cv_.wait(lock, [this] { return outstanding_.load(std::memory_order_acquire) == 0; });
  }

  std::vector<std::string> failures;
  {
    std::lock_guard lock(failure_mutex_);
    failures.swap(failures_);
  }
  if (!failures.empty()) throw TaskFailure(std::move(failures));
  return metrics();
}

void WorkerPool::shutdown() {
  if (closed_.exchange(true)) return;
  std::exception_ptr pending;
  try {
    wait_all();
  } catch (...) {
    pending = std::current_exception();
  }
  stop_workers();
  if (pending) std::rethrow_exception(pending);
}

void WorkerPool::stop_workers() {
  {
    std::lock_guard lock(park_mutex_);
    stop_.store(true, std::memory_order_release);
  }
  park_cv_.notify_all();
  for (auto& w : workers_)
    if (w->thread.joinable()) w->thread.join();
}

RunMetrics WorkerPool::metrics() const {
  RunMetrics m;
  m.workers.reserve(workers_.size());
  for (const auto& w : workers_) {
    m.workers.push_back(WorkerMetrics{
        w->executed.load(std::memory_order_relaxed), w->attempts.load(std::memory_order_relaxed),
        w->steals.load(std::memory_order_relaxed), w->stolen.load(std::memory_order_relaxed),
        w->failed.load(std::memory_order_relaxed)});
  }
  return m;
}

void WorkerPool::reset_metrics() {
  for (auto& w : workers_) {
    w->executed = 0;
    w->attempts = 0;
    w->steals = 0;
    w->stolen = 0;
    w->failed = 0;
  }
}

void WorkerPool::execute(Worker& w, Task& task) {
  try {
    auto work = std::move(task.work);
    work();
  } catch (...) {
    w.failed.fetch_add(1, std::memory_order_relaxed);
    std::lock_guard lock(failure_mutex_);
    failures_.push_back(describe(std::current_exception(), task.id));
  }
  w.executed.fetch_add(1, std::memory_order_relaxed);
  if (outstanding_.fetch_sub(1, std::memory_order_acq_rel) == 1) {
    std::lock_guard lock(done_mutex_);
    done_cv_.notify_all();
  }
}

void WorkerPool::park(std::uint64_t seen_epoch) {
  std::unique_lock lock(park_mutex_);
  sleepers_.fetch_add(1, std::memory_order_seq_cst);
  park_cv_.wait(lock, [&] {
    return stop_.load(std::memory_order_acquire) ||
           epoch_.load(std::memory_order_seq_cst) != seen_epoch;
  });
  sleepers_.fetch_sub(1, std::memory_order_seq_cst);
}

void WorkerPool::worker_loop(std::size_t self) {
  tls_pool = this;
  tls_index = self;
  Worker& me = *workers_[self];
  const std::size_t n = workers_.size();
  unsigned idle_rounds = 0;

  while (true) {
    if (auto task = me.queue->get()) {
      execute(me, *task);
      idle_rounds = 0;
      continue;
    }
    if (stop_.load(std::memory_order_acquire)) break;

    if (n > 1) {
      const std::size_t victim = pick_victim(me.rng, self, n);
      me.attempts.fetch_add(1, std::memory_order_relaxed);
      StealBatch batch = workers_[victim]->queue->steal();
      if (!batch.empty()) {
        me.steals.fetch_add(1, std::memory_order_relaxed);
        me.stolen.fetch_add(batch.tasks.size(), std::memory_order_relaxed);
        if (observer_) {
          StealEvent event{self, victim, batch.bucket, batch.bucket_remaining, {}};
          event.tasks.reserve(batch.tasks.size());
          for (const auto& t : batch.tasks) event.tasks.push_back(t.id);
          observer_(event);
        }
        for (auto& t : batch.tasks) execute(me, t);
        idle_rounds = 0;
        continue;
      }
    }

    if (idle_rounds < kSpinRounds) {
      for (unsigned i = 0; i < (1u << idle_rounds); ++i) cpu_relax();
      ++idle_rounds;
      continue;
    }
    if (idle_rounds < kSpinRounds + kYieldRounds) {
      std::this_thread::yield();
      ++idle_rounds;
      continue;
    }

    const std::uint64_t seen = epoch_.load(std::memory_order_seq_cst);
    if (queued() != 0) {
      // Work exists somewhere; keep stealing instead of sleeping on it.
      idle_rounds = kSpinRounds;
      continue;
    }
    park(seen);
    idle_rounds = 0;
  }

  tls_pool = nullptr;
}

}  // namespace fpm
