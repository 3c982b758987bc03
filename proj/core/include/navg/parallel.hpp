// Copyright 2026 The navg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>

namespace navg {

/// Worker count: hardware concurrency, capped by the NAVG_THREADS
/// environment variable when set. Always at least 1.
std::size_t worker_count();

/// Run fn(begin, end) over [0, total) split into chunks of at most `grain`
/// iterations, distributed dynamically over worker_count() threads.
/// Callers must write results to disjoint slots; chunk completion order is
/// unspecified but slot-indexed output makes results deterministic.
void parallel_for(std::size_t total, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace navg
