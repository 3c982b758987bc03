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
#include <random>
#include <span>
#include <vector>

#include "navg/dataset.hpp"

// Retrieval forest: an ensemble of randomized binary trees whose leaves
// store dataset ids. Each decision node tests the difference of two vector
// components against a threshold. At query time every tree votes for the
// ids in its reached leaf; vote counts rank seed candidates.

namespace navg {

/// Node test: goes left iff x[first_dim] - x[second_dim] <= threshold.
struct SplitParams {
    std::uint32_t first_dim = 0;
    std::uint32_t second_dim = 0;
    float threshold = 0.0f;

    bool operator==(const SplitParams&) const = default;
};

/// Ties (projection exactly equal to the threshold) route left.
inline bool split_goes_left(std::span<const float> x, const SplitParams& s) {
    return x[s.first_dim] - x[s.second_dim] <= s.threshold;
}

enum class EntropyMode : std::uint8_t {
    Diagonal = 0,  // sum of per-dimension log-variances
    Full = 1,      // log-determinant of the covariance matrix
};

struct ForestConfig {
    std::uint32_t num_trees = 64;
    std::uint32_t max_depth = 13;
    std::uint32_t candidates_per_node = 100;
    std::uint32_t min_leaf = 8;
    EntropyMode entropy_mode = EntropyMode::Diagonal;
    double ridge = 1e-6;
    bool bagging = false;
    std::uint64_t rng_seed = 0;

    void validate() const;  // throws std::invalid_argument
    bool operator==(const ForestConfig&) const = default;
};

/// Flattened tree node. Internal nodes carry a split and child indices;
/// leaves carry a range into the tree's bucket id array.
struct TreeNode {
    SplitParams split;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t bucket_begin = 0;
    std::uint32_t bucket_count = 0;

    bool is_leaf() const { return left < 0; }
    bool operator==(const TreeNode&) const = default;
};

/// One trained tree. Nodes are stored in preorder (a node precedes its
/// left subtree which precedes its right subtree); the node index doubles
/// as the creation index, which seeds that node's candidate stream.
struct Tree {
    std::vector<TreeNode> nodes;
    std::vector<std::uint32_t> bucket_ids;  // leaf buckets, sorted unique ids

    /// Index of the leaf reached by routing x from the root.
    std::uint32_t route(std::span<const float> x) const;

    bool operator==(const Tree&) const = default;
};

struct RetrievalForest {
    std::vector<Tree> trees;
    ForestConfig config;
    std::uint32_t dim = 0;

    bool operator==(const RetrievalForest&) const = default;
};

/// Differential entropy of the id set's vectors: Diagonal mode sums
/// log(var_d + ridge) over dimensions, Full mode is log det(Cov + ridge*I).
/// Covariance is the population (1/|S|) form. Throws on an empty set.
double entropy(const VectorDataset& ds, std::span<const std::uint32_t> ids,
               EntropyMode mode, double ridge);

/// Information gain of splitting `ids` with `split`:
/// E(S) - sum_i (|S_i|/|S|) E(S_i), an empty side contributing zero.
double information_gain(const VectorDataset& ds, std::span<const std::uint32_t> ids,
                        const SplitParams& split, EntropyMode mode, double ridge);

/// `count` random split candidates for one node: dimension pairs uniform
/// over ordered distinct pairs, thresholds uniform over the observed range
/// of the node's projection values. One pair draw then one threshold draw
/// per candidate. Requires dim >= 2.
std::vector<SplitParams> propose_splits(std::mt19937_64& rng, std::uint32_t dim,
                                        std::uint32_t count, const VectorDataset& ds,
                                        std::span<const std::uint32_t> ids);

/// Grow one tree over `ids` (greedy gain maximization per node). A node
/// becomes a leaf when the depth cap is hit, it holds fewer than
/// 2*min_leaf samples, or no candidate with both sides >= min_leaf has
/// positive gain. Candidate streams derive from (tree_seed, node index).
Tree train_tree(const VectorDataset& ds, std::vector<std::uint32_t> ids,
                const ForestConfig& config, std::uint64_t tree_seed);

/// Train config.num_trees trees. Per-tree seeds derive from config.rng_seed
/// and the tree index; with bagging each tree sees a bootstrap resample of
/// size N, otherwise all ids. Trees train in parallel. Requires N >= 2.
RetrievalForest train_forest(const VectorDataset& ds, const ForestConfig& config);

/// Per-tree seed used by train_forest (exposed for replay-style tests).
std::uint64_t forest_tree_seed(const ForestConfig& config, std::uint32_t tree_index);

/// Node candidate stream seed used by train_tree (exposed for replay).
std::uint64_t node_stream_seed(std::uint64_t tree_seed, std::uint32_t node_index);

/// All voted (id, votes) pairs for a query, sorted by descending votes,
/// ties by ascending id.
std::vector<std::pair<std::uint32_t, std::uint32_t>> forest_votes(const RetrievalForest& forest,
                                                                  std::span<const float> q);

/// Top `num_seeds` voted ids (fewer if fewer ids received votes).
std::vector<std::uint32_t> query_forest(const RetrievalForest& forest, std::span<const float> q,
                                        std::uint32_t num_seeds);

}  // namespace navg
