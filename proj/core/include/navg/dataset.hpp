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
#include <string>
#include <vector>

namespace navg {

/// Distance used to rank vectors. SquaredL2 skips the square root; it is
/// order-equivalent to L2 and is what the graph builder uses internally.
enum class Metric : std::uint8_t {
    L1 = 0,
    L2 = 1,
    SquaredL2 = 2,
};

std::string metric_name(Metric m);
Metric metric_from_name(const std::string& name);

/// Distance between two vectors of equal dimension. Components are float32
/// but accumulation is in float64 so that ranking stays stable at high
/// dimension. Throws std::invalid_argument on dimension mismatch.
double distance(std::span<const float> a, std::span<const float> b, Metric m);

/// Immutable in-memory vector corpus: N row-major float32 vectors of
/// dimension D, identified by the dense ids 0..N-1.
class VectorDataset {
public:
    VectorDataset() = default;

    /// Takes ownership of `data` (size must be a multiple of dim).
    /// Rejects non-finite components and dim == 0 for nonempty data.
    VectorDataset(std::uint32_t dim, std::vector<float> data);

    std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::uint32_t dim() const { return dim_; }
    bool empty() const { return data_.empty(); }

    std::span<const float> operator[](std::uint32_t id) const {
        return {data_.data() + static_cast<std::size_t>(id) * dim_, dim_};
    }
    const float* row(std::uint32_t id) const {
        return data_.data() + static_cast<std::size_t>(id) * dim_;
    }
    const std::vector<float>& raw() const { return data_; }

private:
    std::uint32_t dim_ = 0;
    std::vector<float> data_;
};

/// Distance between two dataset rows.
double distance(const VectorDataset& ds, std::uint32_t a, std::uint32_t b, Metric m);

/// ceil(fraction * N) distinct ids drawn uniformly without replacement,
/// returned sorted ascending. Deterministic for a fixed seed.
/// Throws std::invalid_argument unless 0 < fraction <= 1.
std::vector<std::uint32_t> sample_uniform(const VectorDataset& ds, double fraction,
                                          std::uint64_t rng_seed);

/// Same draw over an explicit id count (ids 0..n-1).
std::vector<std::uint32_t> sample_uniform_ids(std::size_t n, double fraction,
                                              std::uint64_t rng_seed);

}  // namespace navg
