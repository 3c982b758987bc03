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

#include "navg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dist_kernels.hpp"
#include "navg/parallel.hpp"
#include "navg/rng.hpp"

namespace navg {

namespace {

constexpr std::uint64_t kLevelSalt = 0x6C6576656C2D6B31ULL;

// L2 ranks identically to squared L2, so the builder always ranks on the
// cheaper form for those metrics.
using detail::rank_distance;

}  // namespace

std::span<const std::uint32_t> LevelGraph::neighbors_of(std::uint32_t id) const {
    const std::int64_t row = position_of(id);
    if (row < 0) return {};
    return {adjacency.data() + static_cast<std::size_t>(row) * degree, degree};
}

std::int64_t LevelGraph::position_of(std::uint32_t id) const {
    if (id >= position.size() || position[id] < 0) return -1;
    return position[id];
}

void LevelGraph::rebuild_position(std::size_t dataset_size) {
    position.assign(dataset_size, -1);
    for (std::size_t row = 0; row < vertices.size(); ++row) {
        position[vertices[row]] = static_cast<std::int32_t>(row);
    }
}

const LevelGraph& MultiscaleGraph::level(std::uint32_t lv) const {
    if (lv < 1 || lv > levels.size()) {
        throw std::invalid_argument("level index out of range: " + std::to_string(lv));
    }
    return levels[lv - 1];
}

LevelGraph build_level(const VectorDataset& ds, std::vector<std::uint32_t> vertex_set,
                       std::uint32_t k, Metric metric) {
    if (vertex_set.size() < 2) {
        throw std::invalid_argument("build_level: need at least 2 vertices");
    }
    if (k < 1) throw std::invalid_argument("build_level: k must be >= 1");
    std::sort(vertex_set.begin(), vertex_set.end());
    if (std::adjacent_find(vertex_set.begin(), vertex_set.end()) != vertex_set.end()) {
        throw std::invalid_argument("build_level: duplicate vertex ids");
    }
    if (vertex_set.back() >= ds.size()) {
        throw std::invalid_argument("build_level: vertex id out of dataset range");
    }

    LevelGraph level;
    level.vertices = std::move(vertex_set);
    const std::size_t count = level.vertices.size();
    level.degree = static_cast<std::uint32_t>(
        std::min<std::size_t>(k, count - 1));
    level.adjacency.resize(count * level.degree);

    const std::size_t dim = ds.dim();
    const std::uint32_t deg = level.degree;

    parallel_for(count, 16, [&](std::size_t begin, std::size_t end) {
        // Bounded worst-at-top heap per source; (distance, id) ordering makes
        // ties resolve toward smaller ids.
        std::vector<std::pair<double, std::uint32_t>> heap;
        heap.reserve(deg + 1);
        for (std::size_t row = begin; row < end; ++row) {
            const std::uint32_t src = level.vertices[row];
            const float* sv = ds.row(src);
            heap.clear();
            for (std::size_t j = 0; j < count; ++j) {
                const std::uint32_t cand = level.vertices[j];
                if (cand == src) continue;
                const double d = rank_distance(sv, ds.row(cand), dim, metric);
                if (heap.size() < deg) {
                    heap.emplace_back(d, cand);
                    std::push_heap(heap.begin(), heap.end());
                } else if (std::make_pair(d, cand) < heap.front()) {
                    std::pop_heap(heap.begin(), heap.end());
                    heap.back() = {d, cand};
                    std::push_heap(heap.begin(), heap.end());
                }
            }
            std::sort(heap.begin(), heap.end());
            std::uint32_t* out = level.adjacency.data() + row * deg;
            for (std::size_t j = 0; j < heap.size(); ++j) out[j] = heap[j].second;
        }
    });

    level.rebuild_position(ds.size());
    return level;
}

MultiscaleGraph build_multiscale(const VectorDataset& ds, std::vector<double> fractions,
                                 std::uint32_t k, Metric metric, std::uint64_t rng_seed) {
    if (fractions.empty()) throw std::invalid_argument("build_multiscale: no fractions");
    if (fractions.front() != 1.0) {
        throw std::invalid_argument("build_multiscale: first fraction must be 1");
    }
    for (std::size_t i = 0; i < fractions.size(); ++i) {
        if (!(fractions[i] > 0.0) || fractions[i] > 1.0) {
            throw std::invalid_argument("build_multiscale: fractions must lie in (0, 1]");
        }
        if (i > 0 && !(fractions[i] < fractions[i - 1])) {
            throw std::invalid_argument("build_multiscale: fractions must strictly decrease");
        }
    }
    const std::size_t n = ds.size();
    const auto top_size = static_cast<std::size_t>(
        std::ceil(fractions.back() * static_cast<double>(n)));
    if (top_size < 2) {
        throw std::invalid_argument("build_multiscale: smallest level would hold fewer than 2 vertices");
    }

    MultiscaleGraph graph;
    graph.build_metric = metric;
    graph.k = k;
    graph.fractions = fractions;
    graph.rng_seed = rng_seed;
    graph.dataset_size = n;

    std::vector<std::uint32_t> current(n);
    for (std::size_t i = 0; i < n; ++i) current[i] = static_cast<std::uint32_t>(i);

    for (std::size_t lv = 0; lv < fractions.size(); ++lv) {
        if (lv > 0) {
            const auto target = static_cast<std::size_t>(
                std::ceil(fractions[lv] * static_cast<double>(n)));
            // Drawn from the level below, never the full set: nesting holds by
            // construction.
            std::mt19937_64 rng(derive_seed(rng_seed ^ kLevelSalt, lv));
            current = sample_without_replacement(std::move(current),
                                                 std::min(target, current.size()), rng);
            std::sort(current.begin(), current.end());
        }
        graph.levels.push_back(build_level(ds, current, k, metric));
    }
    return graph;
}

std::span<const std::uint32_t> neighbors(const MultiscaleGraph& graph, std::uint32_t lv,
                                         std::uint32_t v) {
    return graph.level(lv).neighbors_of(v);
}

}  // namespace navg
