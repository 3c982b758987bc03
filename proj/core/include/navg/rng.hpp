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
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

// Deterministic randomness helpers.
//
// The engine is std::mt19937_64, whose output sequence is pinned by the
// standard. The distributions below are hand-rolled because the standard
// library distribution objects are implementation-defined; routing every
// draw through these functions makes index builds reproducible across
// platforms and standard libraries.

namespace navg {

/// SplitMix64 finalizer. Used to derive independent seed streams.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Per-stream seed derivation: stream `id` of master seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t id) {
    return mix64(seed ^ mix64(id + 1));
}

/// Uniform integer in [0, n). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t threshold = (0ULL - n) % n;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % n;
    }
}

/// Uniform real in [lo, hi). 53-bit mantissa draw.
inline double uniform_real(std::mt19937_64& rng, double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
}

/// First `count` elements of a Fisher-Yates shuffle of `pool`, i.e. a
/// uniform sample without replacement. `pool` is consumed by value.
inline std::vector<std::uint32_t> sample_without_replacement(std::vector<std::uint32_t> pool,
                                                             std::size_t count,
                                                             std::mt19937_64& rng) {
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_index(rng, pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    return pool;
}

}  // namespace navg
