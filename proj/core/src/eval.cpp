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

#include "navg/eval.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "dist_kernels.hpp"
#include "navg/parallel.hpp"

namespace navg {

std::vector<std::pair<std::uint32_t, double>> knn_exact(const VectorDataset& ds,
                                                        std::span<const float> q, std::uint32_t k,
                                                        Metric metric) {
    if (q.size() != ds.dim()) throw std::invalid_argument("knn_exact: query dimension mismatch");
    if (k < 1) throw std::invalid_argument("knn_exact: k must be >= 1");
    if (k > ds.size()) {
        throw std::invalid_argument("knn_exact: k exceeds dataset size (" + std::to_string(k) +
                                    " > " + std::to_string(ds.size()) + ")");
    }

    // Rank on the order-equivalent cheap form, report the true metric value.
    std::vector<std::pair<double, std::uint32_t>> heap;  // worst at front
    heap.reserve(k + 1);
    const std::size_t n = ds.size();
    const std::size_t dim = ds.dim();
    for (std::size_t id = 0; id < n; ++id) {
        const double d = detail::rank_distance(q.data(), ds.row(static_cast<std::uint32_t>(id)),
                                               dim, metric);
        const std::pair<double, std::uint32_t> cand{d, static_cast<std::uint32_t>(id)};
        if (heap.size() < k) {
            heap.push_back(cand);
            std::push_heap(heap.begin(), heap.end());
        } else if (cand < heap.front()) {
            std::pop_heap(heap.begin(), heap.end());
            heap.back() = cand;
            std::push_heap(heap.begin(), heap.end());
        }
    }
    std::sort(heap.begin(), heap.end());

    std::vector<std::pair<std::uint32_t, double>> out;
    out.reserve(heap.size());
    for (const auto& [d, id] : heap) {
        out.emplace_back(id, metric == Metric::L2 ? std::sqrt(d) : d);
    }
    return out;
}

std::vector<std::vector<std::int32_t>> ground_truth(const VectorDataset& base,
                                                    const VectorDataset& queries, std::uint32_t k,
                                                    Metric metric) {
    if (queries.dim() != base.dim()) {
        throw std::invalid_argument("ground_truth: query dimension mismatch");
    }
    std::vector<std::vector<std::int32_t>> truth(queries.size());
    parallel_for(queries.size(), 8, [&](std::size_t begin, std::size_t end) {
        for (std::size_t qi = begin; qi < end; ++qi) {
            const auto nn = knn_exact(base, queries[static_cast<std::uint32_t>(qi)], k, metric);
            auto& row = truth[qi];
            row.reserve(nn.size());
            for (const auto& [id, d] : nn) row.push_back(static_cast<std::int32_t>(id));
        }
    });
    return truth;
}

namespace {

template <typename T>
double recall_impl(std::span<const T> pred, std::span<const T> truth) {
    if (truth.empty()) throw std::invalid_argument("recall_at: empty truth");
    std::unordered_set<T> truth_set(truth.begin(), truth.end());
    std::size_t hits = 0;
    for (const T id : pred) hits += truth_set.count(id);
    return static_cast<double>(hits) / static_cast<double>(truth_set.size());
}

}  // namespace

double recall_at(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> truth) {
    return recall_impl(pred, truth);
}

double recall_at(std::span<const std::int32_t> pred, std::span<const std::int32_t> truth) {
    return recall_impl(pred, truth);
}

double speedup(double linear_cost, double method_cost) {
    if (!(linear_cost > 0.0) || !(method_cost > 0.0)) {
        throw std::invalid_argument("speedup: costs must be positive");
    }
    return linear_cost / method_cost;
}

}  // namespace navg
