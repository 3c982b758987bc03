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
#include "navg/forest.hpp"
#include "navg/graph.hpp"

// Gradient-free local search over the multiscale graph. Starting from a
// seed set, each iteration expands the neighbors of the current beam,
// ranks everything seen so far at this level by query distance and keeps
// the best `beam_width`; levels run top (sparsest) to bottom.

namespace navg {

struct SearchParams {
    std::uint32_t beam_width = 10;      // candidates kept per iteration
    std::uint32_t max_iterations = 5;   // per level
    std::uint32_t top_k = 10;           // results requested
    std::uint32_t num_seeds = 10;       // seeds taken from the forest
    Metric query_metric = Metric::L2;
    /// When true, the final top_k is drawn from every vertex evaluated
    /// during the query instead of the final beam; required for
    /// top_k > beam_width.
    bool pool_visited = false;
    /// Record the best beam distance after every iteration (diagnostics).
    bool record_trace = false;

    void validate() const;  // throws std::invalid_argument
};

struct QueryStats {
    std::uint64_t distance_evals = 0;    // distinct vertices ranked against q
    std::uint64_t vertices_visited = 0;  // == distance_evals (visited-once)
    std::vector<std::uint32_t> iterations_per_level;  // top level first
    double wall_seconds = 0.0;
    std::uint64_t forest_nodes_visited = 0;  // routing cost of seed proposal
    std::vector<double> best_distance_trace;  // filled when record_trace
};

struct QueryResult {
    std::vector<std::pair<std::uint32_t, double>> results;  // ascending distance
    QueryStats stats;
};

/// Reusable per-query workspace (visited marks + distance cache). One
/// instance per thread; sharing across concurrent queries is not allowed.
class SearchScratch {
public:
    void prepare(std::size_t dataset_size);

    bool visited(std::uint32_t id) const { return mark_[id] == epoch_; }
    /// Marks id visited; returns false if it already was.
    bool visit(std::uint32_t id) {
        if (mark_[id] == epoch_) return false;
        mark_[id] = epoch_;
        return true;
    }
    void set_distance(std::uint32_t id, double d) { dist_[id] = d; }
    double get_distance(std::uint32_t id) const { return dist_[id]; }

private:
    std::vector<std::uint32_t> mark_;
    std::vector<double> dist_;
    std::uint32_t epoch_ = 0;
};

/// Beam traversal from an explicit seed set. Seeds may be absent from
/// upper levels; they still rank by distance and begin contributing
/// neighbors at the first level that contains them. Visited marks and the
/// distance cache persist across levels, so no vertex is ranked twice.
QueryResult traverse(const VectorDataset& ds, const MultiscaleGraph& graph,
                     std::span<const float> q, std::span<const std::uint32_t> seeds,
                     const SearchParams& params, SearchScratch* scratch = nullptr);

/// Full pipeline: forest votes propose seeds, traversal refines them.
QueryResult search(const VectorDataset& ds, const RetrievalForest& forest,
                   const MultiscaleGraph& graph, std::span<const float> q,
                   const SearchParams& params, SearchScratch* scratch = nullptr);

/// Random-restart baseline: `restarts` distinct uniform seeds on the
/// bottom level, each followed greedily (beam width 1) until convergence
/// or the iteration cap; all evaluated vertices are pooled and ranked.
QueryResult search_gnns(const VectorDataset& ds, const MultiscaleGraph& graph,
                        std::span<const float> q, std::uint32_t restarts,
                        const SearchParams& params, std::uint64_t rng_seed,
                        SearchScratch* scratch = nullptr);

/// Rank an explicit id set by query distance and keep the best top_k.
/// Backs the seed-only (no traversal) query mode.
QueryResult rank_ids(const VectorDataset& ds, std::span<const float> q,
                     std::span<const std::uint32_t> ids, const SearchParams& params);

}  // namespace navg
