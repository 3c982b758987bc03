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

#include "navg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dist_kernels.hpp"
#include "navg/rng.hpp"

namespace navg {

std::string metric_name(Metric m) {
    switch (m) {
        case Metric::L1: return "l1";
        case Metric::L2: return "l2";
        case Metric::SquaredL2: return "sql2";
    }
    throw std::invalid_argument("unknown metric");
}

Metric metric_from_name(const std::string& name) {
    if (name == "l1" || name == "L1") return Metric::L1;
    if (name == "l2" || name == "L2") return Metric::L2;
    if (name == "sql2" || name == "squared_l2") return Metric::SquaredL2;
    throw std::invalid_argument("unknown metric name: " + name);
}

double distance(std::span<const float> a, std::span<const float> b, Metric m) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("distance: dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
    return detail::metric_distance(a.data(), b.data(), a.size(), m);
}

double distance(const VectorDataset& ds, std::uint32_t a, std::uint32_t b, Metric m) {
    return distance(ds[a], ds[b], m);
}

VectorDataset::VectorDataset(std::uint32_t dim, std::vector<float> data)
    : dim_(dim), data_(std::move(data)) {
    if (data_.empty()) {
        dim_ = dim;  // empty dataset may carry any nominal dimension
        return;
    }
    if (dim_ == 0) throw std::invalid_argument("VectorDataset: dimension must be >= 1");
    if (data_.size() % dim_ != 0) {
        throw std::invalid_argument("VectorDataset: data size not a multiple of dimension");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (!std::isfinite(data_[i])) {
            throw std::invalid_argument("VectorDataset: non-finite component at flat index " +
                                        std::to_string(i));
        }
    }
}

std::vector<std::uint32_t> sample_uniform_ids(std::size_t n, double fraction,
                                              std::uint64_t rng_seed) {
    if (!(fraction > 0.0) || fraction > 1.0) {
        throw std::invalid_argument("sample_uniform: fraction must be in (0, 1]");
    }
    const auto count = static_cast<std::size_t>(
        std::ceil(fraction * static_cast<double>(n)));
    std::vector<std::uint32_t> pool(n);
    std::iota(pool.begin(), pool.end(), 0u);
    std::mt19937_64 rng(rng_seed);
    auto picked = sample_without_replacement(std::move(pool), count, rng);
    std::sort(picked.begin(), picked.end());
    return picked;
}

std::vector<std::uint32_t> sample_uniform(const VectorDataset& ds, double fraction,
                                          std::uint64_t rng_seed) {
    return sample_uniform_ids(ds.size(), fraction, rng_seed);
}

}  // namespace navg
