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

#include "navg/search.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "dist_kernels.hpp"
#include "navg/rng.hpp"

namespace navg {

void SearchParams::validate() const {
    if (beam_width < 1) throw std::invalid_argument("SearchParams: beam_width must be >= 1");
    if (max_iterations < 1) {
        throw std::invalid_argument("SearchParams: max_iterations must be >= 1");
    }
    if (top_k < 1) throw std::invalid_argument("SearchParams: top_k must be >= 1");
    if (num_seeds < 1) throw std::invalid_argument("SearchParams: num_seeds must be >= 1");
    if (top_k > beam_width && !pool_visited) {
        throw std::invalid_argument(
            "SearchParams: top_k exceeds beam_width; set pool_visited to rank all evaluated "
            "vertices");
    }
}

void SearchScratch::prepare(std::size_t dataset_size) {
    if (mark_.size() != dataset_size) {
        mark_.assign(dataset_size, 0);
        dist_.assign(dataset_size, 0.0);
        epoch_ = 0;
    }
    if (++epoch_ == 0) {  // epoch counter wrapped; reset marks
        std::fill(mark_.begin(), mark_.end(), 0u);
        epoch_ = 1;
    }
}

namespace {

using Candidate = std::pair<double, std::uint32_t>;  // (distance, id)

struct TraversalState {
    const VectorDataset& ds;
    const SearchParams& params;
    SearchScratch& scratch;
    const float* query;
    QueryStats stats;
    std::vector<Candidate> evaluated;  // every (distance, id) ranked, insertion order

    TraversalState(const VectorDataset& d, const SearchParams& p, SearchScratch& s,
                   const float* q)
        : ds(d), params(p), scratch(s), query(q) {
        scratch.prepare(ds.size());
    }

    // Distance of id to the query, computed at most once per query.
    double rank(std::uint32_t id) {
        if (scratch.visit(id)) {
            const double d =
                detail::metric_distance(query, ds.row(id), ds.dim(), params.query_metric);
            scratch.set_distance(id, d);
            ++stats.distance_evals;
            evaluated.emplace_back(d, id);
            return d;
        }
        return scratch.get_distance(id);
    }

    std::vector<Candidate> seed_beam(std::span<const std::uint32_t> seeds) {
        std::vector<Candidate> beam;
        beam.reserve(seeds.size());
        for (const std::uint32_t s : seeds) {
            if (s >= ds.size()) {
                throw std::invalid_argument("traverse: seed id out of range");
            }
            if (!scratch.visited(s)) beam.emplace_back(rank(s), s);
        }
        std::sort(beam.begin(), beam.end());
        return beam;
    }

    // One level of beam search; `beam` holds the surviving candidates,
    // sorted ascending by (distance, id). Each iteration ranks the beam's
    // unvisited neighbors and keeps the best beam_width of beam + fresh;
    // that bounded merge equals sorting the whole expanded list and taking
    // its head, since the beam is already sorted.
    void run_level(const LevelGraph& level, std::vector<Candidate>& beam) {
        std::uint32_t iterations = 0;
        std::vector<Candidate> fresh, next;
        for (std::uint32_t it = 0; it < params.max_iterations; ++it) {
            ++iterations;
            fresh.clear();
            for (const auto& [d, id] : beam) {
                for (const std::uint32_t nb : level.neighbors_of(id)) {
                    if (!scratch.visited(nb)) fresh.emplace_back(rank(nb), nb);
                }
            }
            std::sort(fresh.begin(), fresh.end());

            next.clear();
            std::size_t i = 0, j = 0;
            while (next.size() < params.beam_width &&
                   (i < beam.size() || j < fresh.size())) {
                if (j == fresh.size() || (i < beam.size() && beam[i] < fresh[j])) {
                    next.push_back(beam[i++]);
                } else {
                    next.push_back(fresh[j++]);
                }
            }
            const bool unchanged = next == beam;
            beam.swap(next);
            if (params.record_trace) stats.best_distance_trace.push_back(beam.front().first);
            if (unchanged) break;
        }
        stats.iterations_per_level.push_back(iterations);
    }

    QueryResult finish(std::vector<Candidate> beam) {
        std::vector<Candidate>& chosen = params.pool_visited ? evaluated : beam;
        if (params.pool_visited) std::sort(chosen.begin(), chosen.end());
        if (chosen.size() > params.top_k) chosen.resize(params.top_k);

        QueryResult out;
        out.results.reserve(chosen.size());
        for (const auto& [d, id] : chosen) out.results.emplace_back(id, d);
        stats.vertices_visited = stats.distance_evals;
        out.stats = std::move(stats);
        return out;
    }
};

}  // namespace

QueryResult traverse(const VectorDataset& ds, const MultiscaleGraph& graph,
                     std::span<const float> q, std::span<const std::uint32_t> seeds,
                     const SearchParams& params, SearchScratch* scratch) {
    params.validate();
    if (seeds.empty()) throw std::invalid_argument("traverse: empty seed set");
    if (q.size() != ds.dim()) throw std::invalid_argument("traverse: query dimension mismatch");
    if (graph.levels.empty()) throw std::invalid_argument("traverse: graph has no levels");

    const auto t0 = std::chrono::steady_clock::now();
    SearchScratch local;
    SearchScratch& ws = scratch ? *scratch : local;
    TraversalState state(ds, params, ws, q.data());

    auto beam = state.seed_beam(seeds);
    for (std::uint32_t lv = graph.num_levels(); lv >= 1; --lv) {
        state.run_level(graph.level(lv), beam);
    }
    auto out = state.finish(std::move(beam));
    out.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

QueryResult search(const VectorDataset& ds, const RetrievalForest& forest,
                   const MultiscaleGraph& graph, std::span<const float> q,
                   const SearchParams& params, SearchScratch* scratch) {
    params.validate();
    if (q.size() != ds.dim() || q.size() != forest.dim) {
        throw std::invalid_argument("search: query dimension mismatch");
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto seeds = query_forest(forest, q, params.num_seeds);
    if (seeds.empty()) throw std::invalid_argument("search: forest produced no seeds");

    // Tree routing cost, counted in nodes touched.
    std::uint64_t hops = 0;
    for (const Tree& tree : forest.trees) {
        std::uint32_t idx = 0;
        while (!tree.nodes[idx].is_leaf()) {
            idx = static_cast<std::uint32_t>(split_goes_left(q, tree.nodes[idx].split)
                                                 ? tree.nodes[idx].left
                                                 : tree.nodes[idx].right);
            ++hops;
        }
    }

    auto out = traverse(ds, graph, q, seeds, params, scratch);
    out.stats.forest_nodes_visited = hops;
    out.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

QueryResult search_gnns(const VectorDataset& ds, const MultiscaleGraph& graph,
                        std::span<const float> q, std::uint32_t restarts,
                        const SearchParams& params, std::uint64_t rng_seed,
                        SearchScratch* scratch) {
    params.validate();
    if (restarts < 1) throw std::invalid_argument("search_gnns: restarts must be >= 1");
    if (q.size() != ds.dim()) {
        throw std::invalid_argument("search_gnns: query dimension mismatch");
    }
    const auto t0 = std::chrono::steady_clock::now();

    SearchScratch local;
    SearchScratch& ws = scratch ? *scratch : local;

    SearchParams pooled = params;
    pooled.pool_visited = true;  // baseline always ranks everything it evaluated
    TraversalState state(ds, pooled, ws, q.data());

    const LevelGraph& bottom = graph.level(1);
    const std::size_t n = ds.size();

    // Distinct uniform seeds over the database.
    std::vector<std::uint32_t> pool(n);
    for (std::size_t i = 0; i < n; ++i) pool[i] = static_cast<std::uint32_t>(i);
    std::mt19937_64 rng(rng_seed);
    const auto seeds = sample_without_replacement(
        std::move(pool), std::min<std::size_t>(restarts, n), rng);

    std::uint32_t total_iterations = 0;
    for (const std::uint32_t seed : seeds) {
        std::uint32_t cur = seed;
        double cur_d = state.rank(cur);
        for (std::uint32_t it = 0; it < params.max_iterations; ++it) {
            ++total_iterations;
            Candidate best{cur_d, cur};
            for (const std::uint32_t nb : bottom.neighbors_of(cur)) {
                if (!ws.visited(nb)) {
                    const Candidate cand{state.rank(nb), nb};
                    best = std::min(best, cand);
                }
            }
            if (best.second == cur) break;  // greedy path converged
            cur = best.second;
            cur_d = best.first;
        }
    }

    auto out = state.finish({});
    out.stats.iterations_per_level.push_back(total_iterations);
    out.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

QueryResult rank_ids(const VectorDataset& ds, std::span<const float> q,
                     std::span<const std::uint32_t> ids, const SearchParams& params) {
    if (q.size() != ds.dim()) throw std::invalid_argument("rank_ids: query dimension mismatch");
    const auto t0 = std::chrono::steady_clock::now();
    QueryResult out;
    std::vector<Candidate> ranked;
    std::vector<std::uint32_t> sorted(ids.begin(), ids.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    ranked.reserve(sorted.size());
    for (const std::uint32_t id : sorted) {
        if (id >= ds.size()) throw std::invalid_argument("rank_ids: id out of range");
        ranked.emplace_back(
            detail::metric_distance(q.data(), ds.row(id), ds.dim(), params.query_metric), id);
    }
    out.stats.distance_evals = ranked.size();
    out.stats.vertices_visited = ranked.size();
    std::sort(ranked.begin(), ranked.end());
    if (ranked.size() > params.top_k) ranked.resize(params.top_k);
    out.results.reserve(ranked.size());
    for (const auto& [d, id] : ranked) out.results.emplace_back(id, d);
    out.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace navg
