#include <doctest.h>

#include <stdexcept>
#include <algorithm>

#include <cmath>
#include <map>
#include <set>

#include "navg/forest.hpp"
#include "navg/index_io.hpp"
#include "navg/rng.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace navg;

namespace {

VectorDataset two_blobs(std::size_t per_cluster, std::uint32_t dim, double sigma,
                        std::uint64_t seed, std::vector<std::uint32_t>* labels = nullptr) {
    // Centers differ per dimension with alternating sign so that the
    // difference features x[a]-x[b] separate the blobs.
    std::mt19937_64 rng(seed);
    std::vector<float> data;
    data.reserve(2 * per_cluster * dim);
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t i = 0; i < per_cluster; ++i) {
            if (labels) labels->push_back(static_cast<std::uint32_t>(c));
            for (std::uint32_t d = 0; d < dim; ++d) {
                const double center = (c == 0) ? 0.0 : ((d % 2 == 0) ? 5.0 : -5.0);
                data.push_back(static_cast<float>(center + sigma * testsupport::gauss(rng)));
            }
        }
    }
    return VectorDataset(dim, std::move(data));
}

std::vector<std::uint32_t> iota_ids(std::size_t n) {
    std::vector<std::uint32_t> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = static_cast<std::uint32_t>(i);
    return ids;
}

std::uint32_t tree_depth(const Tree& tree, std::uint32_t node = 0) {
    const TreeNode& nd = tree.nodes[node];
    if (nd.is_leaf()) return 0;
    return 1 + std::max(tree_depth(tree, static_cast<std::uint32_t>(nd.left)),
                        tree_depth(tree, static_cast<std::uint32_t>(nd.right)));
}

}  // namespace

TEST_CASE("entropy: identical points hit the ridge floor") {
    std::vector<float> data;
    for (int i = 0; i < 5; ++i) data.insert(data.end(), {0.5f, -1.0f, 2.0f, 3.0f});
    VectorDataset ds(4, std::move(data));
    const auto ids = iota_ids(5);
    const double expected = 4.0 * std::log(1e-6);
    CHECK(entropy(ds, ids, EntropyMode::Diagonal, 1e-6) ==
          doctest::Approx(expected).epsilon(1e-9));
    CHECK(entropy(ds, ids, EntropyMode::Full, 1e-6) ==
          doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("entropy: 1-D pair {0, 2} has unit population variance") {
    VectorDataset ds(1, {0.0f, 2.0f});
    const auto ids = iota_ids(2);
    CHECK(entropy(ds, ids, EntropyMode::Diagonal, 1e-6) ==
          doctest::Approx(std::log(1.0 + 1e-6)).epsilon(1e-12));
}

TEST_CASE("entropy: full mode matches an independent log-det oracle") {
    auto ds = testsupport::uniform_dataset(50, 4, 31337, -1.0f, 3.0f);
    const auto ids = iota_ids(50);
    const double got = entropy(ds, ids, EntropyMode::Full, 1e-6);
    const double expected = testsupport::naive_entropy(ds, ids, /*full=*/true, 1e-6);
    CHECK(got == doctest::Approx(expected).epsilon(1e-9));

    const double got_diag = entropy(ds, ids, EntropyMode::Diagonal, 1e-6);
    const double expected_diag = testsupport::naive_entropy(ds, ids, /*full=*/false, 1e-6);
    CHECK(got_diag == doctest::Approx(expected_diag).epsilon(1e-9));
}

TEST_CASE("entropy: empty set is rejected") {
    auto ds = testsupport::uniform_dataset(4, 2, 1);
    CHECK_THROWS_AS(entropy(ds, {}, EntropyMode::Diagonal, 1e-6), std::invalid_argument);
}

TEST_CASE("split test: boundary routes left") {
    const std::vector<float> x{5.0f, 1.0f};
    CHECK_FALSE(split_goes_left(x, {0, 1, 3.0f}));  // 4 > 3 -> right
    CHECK(split_goes_left(x, {0, 1, 4.0f}));        // tie -> left
    const std::vector<float> y{1.0f, 5.0f};
    CHECK(split_goes_left(y, {0, 1, 0.0f}));  // -4 <= 0
}

TEST_CASE("information gain: degenerate splits gain nothing") {
    auto ds = testsupport::uniform_dataset(40, 3, 77, 0.0f, 1.0f);
    const auto ids = iota_ids(40);
    // Threshold beyond every projection: all samples go one way.
    const SplitParams all_left{0, 1, 100.0f};
    CHECK(information_gain(ds, ids, all_left, EntropyMode::Diagonal, 1e-6) == 0.0);

    std::vector<float> same;
    for (int i = 0; i < 12; ++i) same.insert(same.end(), {1.0f, 2.0f, 3.0f});
    VectorDataset identical(3, std::move(same));
    const auto same_ids = iota_ids(12);
    for (const float tau : {-1.0f, -0.5f, 0.0f, 2.0f}) {
        CHECK(std::fabs(information_gain(identical, same_ids, {0, 1, tau},
                                         EntropyMode::Diagonal, 1e-6)) < 1e-9);
    }
}

TEST_CASE("information gain: separating two clusters is positive and matches the oracle") {
    auto ds = two_blobs(40, 4, 0.3, 99);
    const auto ids = iota_ids(80);
    // Projection x[0]-x[1] is ~0 for cluster A and ~10 for cluster B.
    const SplitParams split{0, 1, 5.0f};
    for (const EntropyMode mode : {EntropyMode::Diagonal, EntropyMode::Full}) {
        const double got = information_gain(ds, ids, split, mode, 1e-6);
        const double expected =
            testsupport::naive_gain(ds, ids, 0, 1, 5.0f, mode == EntropyMode::Full, 1e-6);
        CHECK(got > 0.5);
        CHECK(got == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("propose_splits: deterministic, in-range, distinct dims") {
    auto ds = testsupport::uniform_dataset(20, 960, 4242);
    const auto ids = iota_ids(20);
    std::mt19937_64 rng_a(123), rng_b(123);
    const auto a = propose_splits(rng_a, 960, 100, ds, ids);
    const auto b = propose_splits(rng_b, 960, 100, ds, ids);
    CHECK(a == b);
    REQUIRE(a.size() == 100);
    for (const auto& s : a) {
        CHECK(s.first_dim < 960);
        CHECK(s.second_dim < 960);
        CHECK(s.first_dim != s.second_dim);
        double lo = 1e300, hi = -1e300;
        for (const auto id : ids) {
            const double p = ds.row(id)[s.first_dim] - ds.row(id)[s.second_dim];
            lo = std::min(lo, p);
            hi = std::max(hi, p);
        }
        CHECK(s.threshold >= lo);
        CHECK(s.threshold <= hi);
    }
    std::mt19937_64 rng_c(1);
    CHECK_THROWS_AS(propose_splits(rng_c, 1, 10, ds, ids), std::invalid_argument);
}

TEST_CASE("propose_splits: constant projection yields a zero-gain candidate") {
    // x[1] = x[0] + 1 for every point, with dyadic components so the float
    // difference is exactly constant: every (0,1) projection equals -1.
    std::vector<float> data;
    for (int i = 0; i < 30; ++i) {
        const float v = static_cast<float>(i) * 0.03125f;
        data.push_back(v);
        data.push_back(v + 1.0f);
    }
    VectorDataset ds(2, std::move(data));
    const auto ids = iota_ids(30);
    std::mt19937_64 prng(9);
    const auto candidates = propose_splits(prng, 2, 20, ds, ids);
    for (const auto& s : candidates) {
        CHECK(information_gain(ds, ids, s, EntropyMode::Diagonal, 1e-6) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("train_tree: stopping rules produce single leaves") {
    auto ds = testsupport::uniform_dataset(50, 4, 8);
    ForestConfig cfg;
    cfg.max_depth = 0;
    auto tree = train_tree(ds, iota_ids(50), cfg, 1);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.nodes[0].is_leaf());
    CHECK(tree.bucket_ids.size() == 50);

    cfg.max_depth = 13;
    cfg.min_leaf = 50;  // |ids| < 2*min_leaf immediately
    tree = train_tree(ds, iota_ids(50), cfg, 1);
    REQUIRE(tree.nodes.size() == 1);
    CHECK(tree.bucket_ids.size() == 50);
}

TEST_CASE("train_tree: depth-1 tree separates two clusters with high purity") {
    std::vector<std::uint32_t> labels;
    auto ds = two_blobs(100, 8, 0.5, 2718, &labels);
    ForestConfig cfg;
    cfg.max_depth = 1;
    cfg.candidates_per_node = 200;
    cfg.min_leaf = 8;
    const auto tree = train_tree(ds, iota_ids(200), cfg, 3);
    REQUIRE(tree.nodes.size() == 3);
    for (const auto& nd : tree.nodes) {
        if (!nd.is_leaf()) continue;
        std::size_t majority = 0;
        std::map<std::uint32_t, std::size_t> tally;
        for (std::uint32_t i = 0; i < nd.bucket_count; ++i) {
            majority = std::max(majority, ++tally[labels[tree.bucket_ids[nd.bucket_begin + i]]]);
        }
        CHECK(static_cast<double>(majority) >= 0.95 * nd.bucket_count);
    }
}

TEST_CASE("train_forest: deterministic bytes, paper defaults accepted") {
    ForestConfig defaults;
    CHECK(defaults.num_trees == 64);
    CHECK(defaults.max_depth == 13);

    auto ds = testsupport::uniform_dataset(300, 6, 10101);
    ForestConfig cfg;
    cfg.num_trees = 8;
    cfg.max_depth = 5;
    cfg.candidates_per_node = 30;
    cfg.min_leaf = 4;
    cfg.rng_seed = 77;
    const auto a = train_forest(ds, cfg);
    const auto b = train_forest(ds, cfg);
    CHECK(serialize_forest(a, a.dim) == serialize_forest(b, b.dim));
}

TEST_CASE("train_forest: leaf buckets partition the training ids") {
    auto ds = testsupport::uniform_dataset(257, 5, 999);
    ForestConfig cfg;
    cfg.num_trees = 6;
    cfg.max_depth = 6;
    cfg.candidates_per_node = 25;
    cfg.min_leaf = 3;
    cfg.rng_seed = 5;
    const auto forest = train_forest(ds, cfg);
    REQUIRE(forest.trees.size() == 6);
    for (const auto& tree : forest.trees) {
        std::set<std::uint32_t> seen;
        std::size_t total = 0;
        std::uint32_t max_depth_seen = 0;
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
            const auto& nd = tree.nodes[i];
            if (!nd.is_leaf()) continue;
            CHECK(nd.bucket_count >= cfg.min_leaf);
            total += nd.bucket_count;
            for (std::uint32_t j = 0; j < nd.bucket_count; ++j) {
                seen.insert(tree.bucket_ids[nd.bucket_begin + j]);
            }
        }
        CHECK(total == 257);        // disjoint: sizes add up
        CHECK(seen.size() == 257);  // covering: every id present
        max_depth_seen = tree_depth(tree);
        CHECK(max_depth_seen <= cfg.max_depth);
    }
}

TEST_CASE("train_forest: bagging draws a bootstrap per tree") {
    auto ds = testsupport::uniform_dataset(120, 4, 321);
    ForestConfig cfg;
    cfg.num_trees = 4;
    cfg.max_depth = 4;
    cfg.candidates_per_node = 20;
    cfg.min_leaf = 2;
    cfg.bagging = true;
    cfg.rng_seed = 9;
    const auto forest = train_forest(ds, cfg);
    bool some_tree_misses_an_id = false;
    for (const auto& tree : forest.trees) {
        std::set<std::uint32_t> seen(tree.bucket_ids.begin(), tree.bucket_ids.end());
        CHECK(seen.size() == tree.bucket_ids.size());  // buckets stay disjoint
        CHECK(seen.size() <= 120);
        if (seen.size() < 120) some_tree_misses_an_id = true;
        for (const auto id : seen) CHECK(id < 120);
    }
    CHECK(some_tree_misses_an_id);  // bootstrap drops ~1/e of the ids
    CHECK_FALSE(forest.trees[0] == forest.trees[1]);
}

TEST_CASE("train_tree: chosen split replays as the gain argmax") {
    auto ds = testsupport::uniform_dataset(400, 6, 24680);
    ForestConfig cfg;
    cfg.num_trees = 2;
    cfg.max_depth = 4;
    cfg.candidates_per_node = 15;
    cfg.min_leaf = 4;
    cfg.rng_seed = 13;
    const auto forest = train_forest(ds, cfg);

    for (std::uint32_t t = 0; t < cfg.num_trees; ++t) {
        const Tree& tree = forest.trees[t];
        const std::uint64_t tree_seed = forest_tree_seed(cfg, t);

        // Walk the tree, rebuilding each node's sample list by routing.
        struct Frame {
            std::uint32_t node;
            std::vector<std::uint32_t> ids;
        };
        std::vector<Frame> stack{{0, iota_ids(400)}};
        while (!stack.empty()) {
            Frame frame = std::move(stack.back());
            stack.pop_back();
            const TreeNode& nd = tree.nodes[frame.node];
            if (nd.is_leaf()) continue;

            std::mt19937_64 node_rng(node_stream_seed(tree_seed, frame.node));
            const auto candidates = propose_splits(node_rng, ds.dim(), cfg.candidates_per_node,
                                                   ds, frame.ids);

            double best_gain = -1e300;
            std::size_t best_idx = candidates.size();
            for (std::size_t c = 0; c < candidates.size(); ++c) {
                std::size_t n_left = 0;
                for (const auto id : frame.ids) {
                    if (split_goes_left(ds[id], candidates[c])) ++n_left;
                }
                const std::size_t n_right = frame.ids.size() - n_left;
                if (n_left < cfg.min_leaf || n_right < cfg.min_leaf) continue;
                const double gain = information_gain(ds, frame.ids, candidates[c],
                                                     cfg.entropy_mode, cfg.ridge);
                if (gain > best_gain) {
                    best_gain = gain;
                    best_idx = c;
                }
            }
            REQUIRE(best_idx < candidates.size());
            CHECK(best_gain > 0.0);
            CHECK(nd.split == candidates[best_idx]);

            Frame left{static_cast<std::uint32_t>(nd.left), {}};
            Frame right{static_cast<std::uint32_t>(nd.right), {}};
            for (const auto id : frame.ids) {
                (split_goes_left(ds[id], nd.split) ? left.ids : right.ids).push_back(id);
            }
            stack.push_back(std::move(right));
            stack.push_back(std::move(left));
        }
    }
}

TEST_CASE("query_forest: single tree returns a prefix of its reached bucket") {
    auto ds = testsupport::uniform_dataset(100, 4, 111);
    ForestConfig cfg;
    cfg.num_trees = 1;
    cfg.max_depth = 3;
    cfg.candidates_per_node = 20;
    cfg.min_leaf = 4;
    const auto forest = train_forest(ds, cfg);
    const auto q = ds[17];
    const Tree& tree = forest.trees[0];
    const TreeNode& leaf = tree.nodes[tree.route(q)];

    const auto seeds = query_forest(forest, q, 3);
    REQUIRE(seeds.size() == std::min<std::size_t>(3, leaf.bucket_count));
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        CHECK(seeds[i] == tree.bucket_ids[leaf.bucket_begin + i]);  // all votes tie at 1
    }
}

TEST_CASE("query_forest: a training vector collects one vote per tree") {
    auto ds = testsupport::uniform_dataset(150, 5, 888);
    ForestConfig cfg;
    cfg.num_trees = 7;
    cfg.max_depth = 4;
    cfg.candidates_per_node = 25;
    cfg.min_leaf = 2;
    const auto forest = train_forest(ds, cfg);
    const std::uint32_t probe = 42;
    const auto ranked = forest_votes(forest, ds[probe]);
    REQUIRE_FALSE(ranked.empty());
    CHECK(ranked[0].first == probe);
    CHECK(ranked[0].second == cfg.num_trees);
    for (const auto& [id, votes] : ranked) {
        CHECK(votes <= cfg.num_trees);
        CHECK(votes >= 1);
    }
}

TEST_CASE("forest_votes: matches a brute-force routing tally") {
    auto ds = testsupport::uniform_dataset(200, 4, 3131);
    ForestConfig cfg;
    cfg.num_trees = 5;
    cfg.max_depth = 5;
    cfg.candidates_per_node = 20;
    cfg.min_leaf = 2;
    const auto forest = train_forest(ds, cfg);

    auto queries = testsupport::uniform_dataset(10, 4, 777);
    for (std::uint32_t qi = 0; qi < queries.size(); ++qi) {
        const auto q = queries[qi];
        std::map<std::uint32_t, std::uint32_t> expected;
        for (const auto& tree : forest.trees) {
            std::uint32_t idx = 0;
            while (!tree.nodes[idx].is_leaf()) {
                const auto& nd = tree.nodes[idx];
                idx = static_cast<std::uint32_t>(
                    (q[nd.split.first_dim] - q[nd.split.second_dim] <= nd.split.threshold)
                        ? nd.left
                        : nd.right);
            }
            const auto& leaf = tree.nodes[idx];
            for (std::uint32_t j = 0; j < leaf.bucket_count; ++j) {
                ++expected[tree.bucket_ids[leaf.bucket_begin + j]];
            }
        }
        const auto ranked = forest_votes(forest, q);
        REQUIRE(ranked.size() == expected.size());
        for (const auto& [id, votes] : ranked) CHECK(expected.at(id) == votes);
        for (std::size_t i = 1; i < ranked.size(); ++i) {
            const bool ordered = ranked[i - 1].second > ranked[i].second ||
                                 (ranked[i - 1].second == ranked[i].second &&
                                  ranked[i - 1].first < ranked[i].first);
            CHECK(ordered);
        }
    }
}

TEST_CASE("query_forest: dimension mismatch and bad configs are rejected") {
    auto ds = testsupport::uniform_dataset(50, 4, 66);
    ForestConfig cfg;
    cfg.num_trees = 1;
    cfg.max_depth = 2;
    const auto forest = train_forest(ds, cfg);
    const std::vector<float> bad{1.0f, 2.0f};
    CHECK_THROWS_AS(query_forest(forest, bad, 5), std::invalid_argument);

    ForestConfig invalid;
    invalid.num_trees = 0;
    CHECK_THROWS_AS(train_forest(ds, invalid), std::invalid_argument);
    invalid = ForestConfig{};
    invalid.ridge = 0.0;
    CHECK_THROWS_AS(train_forest(ds, invalid), std::invalid_argument);
    VectorDataset tiny(3, {1.0f, 2.0f, 3.0f});
    CHECK_THROWS_AS(train_forest(tiny, ForestConfig{}), std::invalid_argument);
}
