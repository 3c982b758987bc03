#include <doctest.h>

#include <limits>
#include <stdexcept>

#include <cmath>
#include <set>

#include "navg/dataset.hpp"
#include "navg/rng.hpp"
#include "support/synthetic.hpp"

using namespace navg;

TEST_CASE("distance: hand-computed values") {
    const std::vector<float> a{0.0f, 0.0f}, b{3.0f, 4.0f};
    CHECK(distance(a, b, Metric::L2) == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(distance(a, b, Metric::SquaredL2) == doctest::Approx(25.0).epsilon(1e-12));

    const std::vector<float> c{1.0f, 2.0f};
    CHECK(distance(c, c, Metric::L1) == 0.0);

    const std::vector<float> d{1.0f, -1.0f}, e{-1.0f, 2.0f};
    CHECK(distance(d, e, Metric::L1) == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("distance: dimension mismatch throws") {
    const std::vector<float> a{1.0f}, b{1.0f, 2.0f};
    CHECK_THROWS_AS(distance(a, b, Metric::L2), std::invalid_argument);
}

TEST_CASE("distance: symmetry, non-negativity, identity on random vectors") {
    auto ds = testsupport::uniform_dataset(60, 12, 991, -2.0f, 2.0f);
    for (const Metric m : {Metric::L1, Metric::L2, Metric::SquaredL2}) {
        for (std::uint32_t i = 0; i < 30; ++i) {
            const auto a = ds[i];
            const auto b = ds[59 - i];
            CHECK(distance(a, a, m) == 0.0);
            CHECK(distance(a, b, m) == distance(b, a, m));
            CHECK(distance(a, b, m) >= 0.0);
        }
    }
}

TEST_CASE("distance: SquaredL2 ranks exactly like L2") {
    auto ds = testsupport::uniform_dataset(90, 8, 1234, -1.0f, 1.0f);
    auto sign = [](double v) { return (v > 0) - (v < 0); };
    for (std::uint32_t i = 0; i < 30; ++i) {
        const auto a = ds[3 * i];
        const auto b = ds[3 * i + 1];
        const auto c = ds[3 * i + 2];
        const int squared = sign(distance(a, b, Metric::SquaredL2) -
                                 distance(a, c, Metric::SquaredL2));
        const int plain = sign(distance(a, b, Metric::L2) - distance(a, c, Metric::L2));
        CHECK(squared == plain);
    }
}

TEST_CASE("VectorDataset rejects bad input") {
    CHECK_THROWS_AS(VectorDataset(0, std::vector<float>{1.0f}), std::invalid_argument);
    CHECK_THROWS_AS(VectorDataset(2, std::vector<float>{1.0f, 2.0f, 3.0f}),
                    std::invalid_argument);
    CHECK_THROWS_AS(VectorDataset(1, std::vector<float>{std::nanf("")}), std::invalid_argument);
    CHECK_THROWS_AS(
        VectorDataset(1, std::vector<float>{std::numeric_limits<float>::infinity()}),
        std::invalid_argument);
    const VectorDataset empty;
    CHECK(empty.size() == 0);
}

TEST_CASE("sample_uniform: full fraction returns every id") {
    auto ds = testsupport::uniform_dataset(10, 2, 7);
    const auto ids = sample_uniform(ds, 1.0, 42);
    REQUIRE(ids.size() == 10);
    for (std::uint32_t i = 0; i < 10; ++i) CHECK(ids[i] == i);
}

TEST_CASE("sample_uniform: deterministic for a fixed seed, size is ceil") {
    auto ds = testsupport::uniform_dataset(10, 2, 7);
    CHECK(sample_uniform(ds, 0.5, 99) == sample_uniform(ds, 0.5, 99));
    CHECK(sample_uniform(ds, 0.25, 1).size() == 3);  // ceil(2.5)
    CHECK_THROWS_AS(sample_uniform(ds, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_uniform(ds, 1.5, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_uniform(ds, -0.1, 1), std::invalid_argument);
}

TEST_CASE("sample_uniform: draws are uniform over ids (chi-square)") {
    const std::size_t n = 1000;
    const std::size_t draws = 1000;
    auto ds = testsupport::uniform_dataset(n, 2, 5);
    std::vector<std::uint32_t> counts(n, 0);
    for (std::size_t d = 0; d < draws; ++d) {
        const auto ids = sample_uniform(ds, 0.1, derive_seed(0xC0FFEE, d));
        REQUIRE(ids.size() == 100);
        std::set<std::uint32_t> distinct(ids.begin(), ids.end());
        REQUIRE(distinct.size() == 100);
        for (const auto id : ids) ++counts[id];
    }
    // Each id's count is Binomial(1000, 0.1)-ish: expectation 100,
    // per-draw variance p(1-p). The statistic concentrates near
    // n * draws * p * (1-p) / expected = 900; 1100 is ~ +5 sigma.
    double stat = 0.0;
    for (const auto c : counts) {
        const double diff = static_cast<double>(c) - 100.0;
        stat += diff * diff / 100.0;
    }
    CHECK(stat < 1100.0);
    CHECK(stat > 700.0);
}
