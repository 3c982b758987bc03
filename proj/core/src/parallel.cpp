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

#include "navg/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace navg {

std::size_t worker_count() {
    std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NAVG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) n = std::min<std::size_t>(n, static_cast<std::size_t>(v));
    }
    return n;
}

void parallel_for(std::size_t total, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
    if (total == 0) return;
    grain = std::max<std::size_t>(1, grain);
    const std::size_t workers = std::min(worker_count(), (total + grain - 1) / grain);
    if (workers <= 1) {
        fn(0, total);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;

    auto body = [&] {
        for (;;) {
            const std::size_t begin = next.fetch_add(grain);
            if (begin >= total) return;
            const std::size_t end = std::min(total, begin + grain);
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(workers - 1);
    for (std::size_t i = 1; i < workers; ++i) threads.emplace_back(body);
    body();
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace navg
