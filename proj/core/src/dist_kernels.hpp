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

#include <cmath>
#include <cstddef>

#include "navg/dataset.hpp"

// Internal distance kernels. float32 inputs, float64 accumulation.

namespace navg::detail {

inline double sq_l2(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    return acc;
}

inline double l1(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i]));
    }
    return acc;
}

inline double metric_distance(const float* a, const float* b, std::size_t n, Metric m) {
    switch (m) {
        case Metric::L1: return l1(a, b, n);
        case Metric::L2: return std::sqrt(sq_l2(a, b, n));
        case Metric::SquaredL2: return sq_l2(a, b, n);
    }
    return 0.0;  // unreachable
}

/// Order-equivalent cheap form: L2 ranks via squared L2.
inline double rank_distance(const float* a, const float* b, std::size_t n, Metric m) {
    return m == Metric::L1 ? l1(a, b, n) : sq_l2(a, b, n);
}

}  // namespace navg::detail
