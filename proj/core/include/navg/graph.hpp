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

#include <cstdint>
#include <span>
#include <vector>

#include "navg/dataset.hpp"

// Multiscale navigation graph: M nested vertex levels, each with directed
// exact k-NN adjacency computed within that level. Level 1 (bottom) holds
// every dataset id; higher levels hold uniformly subsampled, nested
// subsets. Edges are directed: q in knn(p) does not imply p in knn(q).

namespace navg {

struct LevelGraph {
    std::vector<std::uint32_t> vertices;   // sorted ascending
    std::uint32_t degree = 0;              // min(k, |V| - 1)
    std::vector<std::uint32_t> adjacency;  // |V| * degree, rows follow `vertices`

    /// Out-neighbors of `id`, sorted ascending by build distance (ties by
    /// ascending id). Empty when `id` is not a vertex of this level.
    std::span<const std::uint32_t> neighbors_of(std::uint32_t id) const;

    /// Row index of `id` within this level, or -1.
    std::int64_t position_of(std::uint32_t id) const;

    bool operator==(const LevelGraph& other) const {
        return vertices == other.vertices && degree == other.degree &&
               adjacency == other.adjacency;
    }

    // id -> row lookup, rebuilt after construction/load (not serialized).
    std::vector<std::int32_t> position;
    void rebuild_position(std::size_t dataset_size);
};

struct MultiscaleGraph {
    std::vector<LevelGraph> levels;  // levels[0] = level 1 (bottom, all ids)
    Metric build_metric = Metric::L2;
    std::uint32_t k = 20;
    std::vector<double> fractions;  // per level, fractions[0] == 1
    std::uint64_t rng_seed = 0;
    std::uint64_t dataset_size = 0;

    std::uint32_t num_levels() const { return static_cast<std::uint32_t>(levels.size()); }

    /// 1-based level access (1 = bottom, num_levels() = top). Throws on
    /// out-of-range levels.
    const LevelGraph& level(std::uint32_t lv) const;

    bool operator==(const MultiscaleGraph& other) const {
        return levels == other.levels && build_metric == other.build_metric && k == other.k &&
               fractions == other.fractions && rng_seed == other.rng_seed &&
               dataset_size == other.dataset_size;
    }
};

/// Exact directed k-NN adjacency over `vertex_set` (>= 2 vertices): for
/// each vertex, the min(k, |V|-1) nearest other vertices under `metric`,
/// ties by ascending id. No symmetrization.
LevelGraph build_level(const VectorDataset& ds, std::vector<std::uint32_t> vertex_set,
                       std::uint32_t k, Metric metric);

/// Build all levels: level 1 = all ids, each higher level drawn uniformly
/// from the level below it (nesting holds by construction), adjacency per
/// level via build_level. `fractions` must start at 1 and be strictly
/// decreasing; the smallest level must keep at least 2 vertices.
MultiscaleGraph build_multiscale(const VectorDataset& ds, std::vector<double> fractions,
                                 std::uint32_t k, Metric metric, std::uint64_t rng_seed);

/// Adjacency of v at 1-based level lv: the stored k-list, or empty when v
/// is not a vertex of that level. Throws when lv is out of range.
std::span<const std::uint32_t> neighbors(const MultiscaleGraph& graph, std::uint32_t lv,
                                         std::uint32_t v);

}  // namespace navg
