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
#include <functional>
#include <optional>
#include <variant>

#include "fpm/types.hpp"

namespace fpm {

using TaskId = std::uint64_t;

/// Policy payload attached to a task. The priority policy reads the integer
/// rank; the clustered policy reads the itemset reference. The referenced
/// itemset must outlive the task.
using Priority = std::variant<std::monostate, std::int64_t, const Itemset*>;

struct TaskAttributes {
  Priority priority{};
  /// Worker whose queue receives the task instead of the spawner's.
  std::optional<std::size_t> affinity{};
};

struct Task {
  std::function<void()> work;
  TaskAttributes attrs{};
  TaskId id = 0;
};

}  // namespace fpm
