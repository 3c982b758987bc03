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

// Exact nearest-neighbor ground truth and the evaluation metrics reported
// by the benchmark harness.

namespace navg {

/// Exact K nearest ids by full scan, ascending distance, ties by ascending
/// id. Throws when K < 1 or K > N.
std::vector<std::pair<std::uint32_t, double>> knn_exact(const VectorDataset& ds,
                                                        std::span<const float> q, std::uint32_t k,
                                                        Metric metric);

/// knn_exact over a whole query set (parallel across queries), ids only.
std::vector<std::vector<std::int32_t>> ground_truth(const VectorDataset& base,
                                                    const VectorDataset& queries, std::uint32_t k,
                                                    Metric metric);

/// |pred ∩ truth| / |truth|. Throws on empty truth.
double recall_at(std::span<const std::uint32_t> pred, std::span<const std::uint32_t> truth);
double recall_at(std::span<const std::int32_t> pred, std::span<const std::int32_t> truth);

/// linear_cost / method_cost, both in the same unit (distance evaluations
/// or seconds). Throws on non-positive cost.
double speedup(double linear_cost, double method_cost);

}  // namespace navg
