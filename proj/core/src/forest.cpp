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

#include "navg/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "navg/parallel.hpp"
#include "navg/rng.hpp"

namespace navg {

namespace {

constexpr std::uint64_t kForestSalt = 0x666F726573742D31ULL;
constexpr std::uint64_t kNodeSalt = 0x6E6F64652D73656DULL;
constexpr std::uint64_t kBagSalt = 0x626167672D313131ULL;

}  // namespace

void ForestConfig::validate() const {
    if (num_trees < 1) throw std::invalid_argument("ForestConfig: num_trees must be >= 1");
    if (candidates_per_node < 1) {
        throw std::invalid_argument("ForestConfig: candidates_per_node must be >= 1");
    }
    if (min_leaf < 1) throw std::invalid_argument("ForestConfig: min_leaf must be >= 1");
    if (!(ridge > 0.0)) throw std::invalid_argument("ForestConfig: ridge must be > 0");
}

// ---------------------------------------------------------------------------
// Entropy. Both the public functions and the trainer funnel through the
// helpers below so that a replayed gain computation is bit-identical to the
// one made during training.

namespace {

// Sum of log(population variance + ridge) over dimensions, from per-dim
// moment sums. Rounding can push a tiny variance below zero; clamp.
double diag_entropy_from_moments(const double* sum, const double* sum_sq, std::size_t count,
                                 std::size_t dim, double ridge) {
    const double inv = 1.0 / static_cast<double>(count);
    double acc = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        const double mean = sum[d] * inv;
        const double var = std::max(0.0, sum_sq[d] * inv - mean * mean);
        acc += std::log(var + ridge);
    }
    return acc;
}

// log det of (Cov + ridge I) via Cholesky. `cross` is the dim x dim matrix
// of summed component products.
double full_entropy_from_moments(const double* sum, const double* cross, std::size_t count,
                                 std::size_t dim, double ridge) {
    const double inv = 1.0 / static_cast<double>(count);
    std::vector<double> a(dim * dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double mi = sum[i] * inv;
        for (std::size_t j = 0; j <= i; ++j) {
            const double mj = sum[j] * inv;
            double cov = cross[i * dim + j] * inv - mi * mj;
            if (i == j) cov = std::max(0.0, cov) + ridge;
            a[i * dim + j] = cov;
        }
    }
    // In-place lower Cholesky.
    double log_det = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a[i * dim + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * dim + k] * a[j * dim + k];
            if (i == j) {
                if (!(s > 0.0)) {
                    throw std::runtime_error("entropy: covariance not positive definite");
                }
                a[i * dim + i] = std::sqrt(s);
                log_det += 2.0 * std::log(a[i * dim + i]);
            } else {
                a[i * dim + j] = s / a[j * dim + j];
            }
        }
    }
    return log_det;
}

void accumulate_diag(const float* x, std::size_t dim, double* sum, double* sum_sq) {
    for (std::size_t d = 0; d < dim; ++d) {
        const double v = static_cast<double>(x[d]);
        sum[d] += v;
        sum_sq[d] += v * v;
    }
}

void accumulate_full(const float* x, std::size_t dim, double* sum, double* cross) {
    for (std::size_t i = 0; i < dim; ++i) {
        const double vi = static_cast<double>(x[i]);
        sum[i] += vi;
        for (std::size_t j = 0; j <= i; ++j) cross[i * dim + j] += vi * static_cast<double>(x[j]);
    }
}

double entropy_of_ids(const VectorDataset& ds, std::span<const std::uint32_t> ids,
                      EntropyMode mode, double ridge) {
    const std::size_t dim = ds.dim();
    if (mode == EntropyMode::Diagonal) {
        std::vector<double> sum(dim, 0.0), sum_sq(dim, 0.0);
        for (const std::uint32_t id : ids) accumulate_diag(ds.row(id), dim, sum.data(), sum_sq.data());
        return diag_entropy_from_moments(sum.data(), sum_sq.data(), ids.size(), dim, ridge);
    }
    std::vector<double> sum(dim, 0.0), cross(dim * dim, 0.0);
    for (const std::uint32_t id : ids) accumulate_full(ds.row(id), dim, sum.data(), cross.data());
    return full_entropy_from_moments(sum.data(), cross.data(), ids.size(), dim, ridge);
}

double weighted_gain(double parent_entropy, std::size_t n, double left_entropy, std::size_t n_left,
                     double right_entropy, std::size_t n_right) {
    double gain = parent_entropy;
    const double inv = 1.0 / static_cast<double>(n);
    if (n_left > 0) gain -= static_cast<double>(n_left) * inv * left_entropy;
    if (n_right > 0) gain -= static_cast<double>(n_right) * inv * right_entropy;
    return gain;
}

}  // namespace

double entropy(const VectorDataset& ds, std::span<const std::uint32_t> ids, EntropyMode mode,
               double ridge) {
    if (ids.empty()) throw std::invalid_argument("entropy: empty sample set");
    if (!(ridge > 0.0)) throw std::invalid_argument("entropy: ridge must be > 0");
    return entropy_of_ids(ds, ids, mode, ridge);
}

double information_gain(const VectorDataset& ds, std::span<const std::uint32_t> ids,
                        const SplitParams& split, EntropyMode mode, double ridge) {
    if (ids.empty()) throw std::invalid_argument("information_gain: empty sample set");
    std::vector<std::uint32_t> left, right;
    left.reserve(ids.size());
    right.reserve(ids.size());
    for (const std::uint32_t id : ids) {
        (split_goes_left(ds[id], split) ? left : right).push_back(id);
    }
    const double parent = entropy_of_ids(ds, ids, mode, ridge);
    const double el = left.empty() ? 0.0 : entropy_of_ids(ds, left, mode, ridge);
    const double er = right.empty() ? 0.0 : entropy_of_ids(ds, right, mode, ridge);
    return weighted_gain(parent, ids.size(), el, left.size(), er, right.size());
}

std::vector<SplitParams> propose_splits(std::mt19937_64& rng, std::uint32_t dim,
                                        std::uint32_t count, const VectorDataset& ds,
                                        std::span<const std::uint32_t> ids) {
    if (dim < 2) throw std::invalid_argument("propose_splits: dimension must be >= 2");
    if (count < 1) throw std::invalid_argument("propose_splits: count must be >= 1");
    std::vector<SplitParams> out;
    out.reserve(count);
    for (std::uint32_t c = 0; c < count; ++c) {
        SplitParams s;
        s.first_dim = static_cast<std::uint32_t>(uniform_index(rng, dim));
        std::uint32_t b = static_cast<std::uint32_t>(uniform_index(rng, dim - 1));
        if (b >= s.first_dim) ++b;
        s.second_dim = b;
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const std::uint32_t id : ids) {
            const float* x = ds.row(id);
            const double p = static_cast<double>(x[s.first_dim] - x[s.second_dim]);
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        if (ids.empty()) lo = hi = 0.0;
        s.threshold = static_cast<float>(uniform_real(rng, lo, hi));
        out.push_back(s);
    }
    return out;
}

std::uint64_t forest_tree_seed(const ForestConfig& config, std::uint32_t tree_index) {
    return derive_seed(config.rng_seed ^ kForestSalt, tree_index);
}

std::uint64_t node_stream_seed(std::uint64_t tree_seed, std::uint32_t node_index) {
    return derive_seed(tree_seed ^ kNodeSalt, node_index);
}

// ---------------------------------------------------------------------------
// Training.

namespace {

// Candidate evaluation works in blocks small enough that the per-candidate
// moment buffers stay cache-resident while streaming the node's vectors.
constexpr std::size_t kCandidateBlock = 16;

struct TreeBuilder {
    const VectorDataset& ds;
    const ForestConfig& config;
    std::uint64_t tree_seed;
    Tree tree;

    // Scratch reused across nodes: per (block candidate, side) moments.
    std::size_t dim;
    std::vector<double> sums;       // block * 2 * dim
    std::vector<double> sq_or_cross;  // diag: block * 2 * dim; full: block * 2 * dim * dim
    std::vector<std::uint32_t> counts;  // block * 2
    std::vector<double> parent_sum, parent_sq;

    TreeBuilder(const VectorDataset& d, const ForestConfig& c, std::uint64_t seed)
        : ds(d), config(c), tree_seed(seed), dim(d.dim()) {
        const std::size_t second = config.entropy_mode == EntropyMode::Diagonal ? dim : dim * dim;
        sums.resize(kCandidateBlock * 2 * dim);
        sq_or_cross.resize(kCandidateBlock * 2 * second);
        counts.resize(kCandidateBlock * 2);
        parent_sum.resize(dim);
        parent_sq.resize(second);
    }

    std::uint32_t new_node() {
        tree.nodes.emplace_back();
        return static_cast<std::uint32_t>(tree.nodes.size() - 1);
    }

    void make_leaf(std::uint32_t node, std::span<std::uint32_t> ids) {
        std::sort(ids.begin(), ids.end());
        const auto unique_end = std::unique(ids.begin(), ids.end());
        tree.nodes[node].left = tree.nodes[node].right = -1;
        tree.nodes[node].bucket_begin = static_cast<std::uint32_t>(tree.bucket_ids.size());
        tree.nodes[node].bucket_count = static_cast<std::uint32_t>(unique_end - ids.begin());
        tree.bucket_ids.insert(tree.bucket_ids.end(), ids.begin(), unique_end);
    }

    double parent_entropy(std::span<const std::uint32_t> ids) {
        std::fill(parent_sum.begin(), parent_sum.end(), 0.0);
        std::fill(parent_sq.begin(), parent_sq.end(), 0.0);
        if (config.entropy_mode == EntropyMode::Diagonal) {
            for (const std::uint32_t id : ids) {
                accumulate_diag(ds.row(id), dim, parent_sum.data(), parent_sq.data());
            }
            return diag_entropy_from_moments(parent_sum.data(), parent_sq.data(), ids.size(), dim,
                                             config.ridge);
        }
        for (const std::uint32_t id : ids) {
            accumulate_full(ds.row(id), dim, parent_sum.data(), parent_sq.data());
        }
        return full_entropy_from_moments(parent_sum.data(), parent_sq.data(), ids.size(), dim,
                                         config.ridge);
    }

    // Gains for candidates[first, first+block) over `ids`; ineligible
    // candidates (a side smaller than min_leaf) get -inf.
    void evaluate_block(std::span<const std::uint32_t> ids,
                        const std::vector<SplitParams>& candidates, std::size_t first,
                        std::size_t block, double parent, std::vector<double>& gains) {
        const std::size_t second =
            config.entropy_mode == EntropyMode::Diagonal ? dim : dim * dim;
        std::fill(sums.begin(), sums.begin() + static_cast<std::ptrdiff_t>(block * 2 * dim), 0.0);
        std::fill(sq_or_cross.begin(),
                  sq_or_cross.begin() + static_cast<std::ptrdiff_t>(block * 2 * second), 0.0);
        std::fill(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(block * 2), 0u);

        const bool diag = config.entropy_mode == EntropyMode::Diagonal;
        for (const std::uint32_t id : ids) {
            const float* x = ds.row(id);
            for (std::size_t c = 0; c < block; ++c) {
                const SplitParams& s = candidates[first + c];
                const std::size_t side =
                    (x[s.first_dim] - x[s.second_dim] <= s.threshold) ? 0 : 1;
                const std::size_t slot = c * 2 + side;
                ++counts[slot];
                if (diag) {
                    accumulate_diag(x, dim, &sums[slot * dim], &sq_or_cross[slot * dim]);
                } else {
                    accumulate_full(x, dim, &sums[slot * dim], &sq_or_cross[slot * second]);
                }
            }
        }

        for (std::size_t c = 0; c < block; ++c) {
            const std::uint32_t nl = counts[c * 2];
            const std::uint32_t nr = counts[c * 2 + 1];
            if (nl < config.min_leaf || nr < config.min_leaf) {
                gains[first + c] = -std::numeric_limits<double>::infinity();
                continue;
            }
            double el, er;
            if (diag) {
                el = diag_entropy_from_moments(&sums[(c * 2) * dim], &sq_or_cross[(c * 2) * dim],
                                               nl, dim, config.ridge);
                er = diag_entropy_from_moments(&sums[(c * 2 + 1) * dim],
                                               &sq_or_cross[(c * 2 + 1) * dim], nr, dim,
                                               config.ridge);
            } else {
                el = full_entropy_from_moments(&sums[(c * 2) * dim],
                                               &sq_or_cross[(c * 2) * second], nl, dim,
                                               config.ridge);
                er = full_entropy_from_moments(&sums[(c * 2 + 1) * dim],
                                               &sq_or_cross[(c * 2 + 1) * second], nr, dim,
                                               config.ridge);
            }
            gains[first + c] = weighted_gain(parent, ids.size(), el, nl, er, nr);
        }
    }

    void grow(std::uint32_t node, std::span<std::uint32_t> ids, std::uint32_t depth) {
        if (depth >= config.max_depth || ids.size() < 2 * static_cast<std::size_t>(config.min_leaf)) {
            make_leaf(node, ids);
            return;
        }

        std::mt19937_64 node_rng(node_stream_seed(tree_seed, node));
        const auto candidates = propose_splits(node_rng, ds.dim(), config.candidates_per_node, ds,
                                               std::span<const std::uint32_t>(ids));

        const double parent = parent_entropy(ids);
        std::vector<double> gains(candidates.size());
        for (std::size_t first = 0; first < candidates.size(); first += kCandidateBlock) {
            const std::size_t block = std::min(kCandidateBlock, candidates.size() - first);
            evaluate_block(ids, candidates, first, block, parent, gains);
        }

        std::size_t best = 0;
        for (std::size_t c = 1; c < gains.size(); ++c) {
            if (gains[c] > gains[best]) best = c;
        }
        if (!(gains[best] > 0.0)) {  // no eligible candidate improves the node
            make_leaf(node, ids);
            return;
        }

        const SplitParams chosen = candidates[best];
        auto mid = std::stable_partition(ids.begin(), ids.end(), [&](std::uint32_t id) {
            return split_goes_left(ds[id], chosen);
        });
        tree.nodes[node].split = chosen;

        const std::uint32_t left = new_node();
        tree.nodes[node].left = static_cast<std::int32_t>(left);
        grow(left, ids.subspan(0, static_cast<std::size_t>(mid - ids.begin())), depth + 1);

        const std::uint32_t right = new_node();
        tree.nodes[node].right = static_cast<std::int32_t>(right);
        grow(right, ids.subspan(static_cast<std::size_t>(mid - ids.begin())), depth + 1);
    }
};

}  // namespace

Tree train_tree(const VectorDataset& ds, std::vector<std::uint32_t> ids,
                const ForestConfig& config, std::uint64_t tree_seed) {
    config.validate();
    if (ids.empty()) throw std::invalid_argument("train_tree: empty training set");
    if (ds.dim() < 2) throw std::invalid_argument("train_tree: dimension must be >= 2");
    TreeBuilder builder(ds, config, tree_seed);
    const std::uint32_t root = builder.new_node();
    builder.grow(root, ids, 0);
    return std::move(builder.tree);
}

RetrievalForest train_forest(const VectorDataset& ds, const ForestConfig& config) {
    config.validate();
    if (ds.size() < 2) throw std::invalid_argument("train_forest: need at least 2 vectors");
    if (ds.dim() < 2) throw std::invalid_argument("train_forest: dimension must be >= 2");

    RetrievalForest forest;
    forest.config = config;
    forest.dim = ds.dim();
    forest.trees.resize(config.num_trees);

    const std::size_t n = ds.size();
    parallel_for(config.num_trees, 1, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const std::uint64_t seed = forest_tree_seed(config, static_cast<std::uint32_t>(t));
            std::vector<std::uint32_t> ids;
            ids.reserve(n);
            if (config.bagging) {
                std::mt19937_64 bag_rng(derive_seed(seed ^ kBagSalt, 0));
                for (std::size_t i = 0; i < n; ++i) {
                    ids.push_back(static_cast<std::uint32_t>(uniform_index(bag_rng, n)));
                }
                std::sort(ids.begin(), ids.end());
            } else {
                ids.resize(n);
                for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint32_t>(i);
            }
            forest.trees[t] = train_tree(ds, std::move(ids), config, seed);
        }
    });
    return forest;
}

std::uint32_t Tree::route(std::span<const float> x) const {
    std::uint32_t idx = 0;
    while (!nodes[idx].is_leaf()) {
        const TreeNode& nd = nodes[idx];
        idx = static_cast<std::uint32_t>(split_goes_left(x, nd.split) ? nd.left : nd.right);
    }
    return idx;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> forest_votes(const RetrievalForest& forest,
                                                                  std::span<const float> q) {
    if (q.size() != forest.dim) {
        throw std::invalid_argument("forest_votes: query dimension mismatch");
    }
    std::unordered_map<std::uint32_t, std::uint32_t> votes;
    for (const Tree& tree : forest.trees) {
        const TreeNode& leaf = tree.nodes[tree.route(q)];
        for (std::uint32_t i = 0; i < leaf.bucket_count; ++i) {
            ++votes[tree.bucket_ids[leaf.bucket_begin + i]];
        }
    }
    std::vector<std::pair<std::uint32_t, std::uint32_t>> ranked(votes.begin(), votes.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    return ranked;
}

std::vector<std::uint32_t> query_forest(const RetrievalForest& forest, std::span<const float> q,
                                        std::uint32_t num_seeds) {
    if (num_seeds < 1) throw std::invalid_argument("query_forest: num_seeds must be >= 1");
    const auto ranked = forest_votes(forest, q);
    std::vector<std::uint32_t> seeds;
    seeds.reserve(std::min<std::size_t>(num_seeds, ranked.size()));
    for (std::size_t i = 0; i < ranked.size() && i < num_seeds; ++i) {
        seeds.push_back(ranked[i].first);
    }
    return seeds;
}

}  // namespace navg
