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
#include <filesystem>
#include <vector>

#include "navg/forest.hpp"
#include "navg/graph.hpp"

// On-disk index container ("NVG1"): a section table holding the metadata,
// the serialized forest and the serialized graph. Everything little-endian
// with explicit counts; the full byte layout is documented in the README
// so readers in other languages can parse it. Forest ("NVGF") and graph
// ("NVGG") sections double as standalone files.

namespace navg {

struct IndexMetadata {
    std::uint64_t dataset_size = 0;
    std::uint32_t dim = 0;
    Metric build_metric = Metric::L2;
    std::uint64_t rng_seed = 0;       // master seed both builders derive from
    std::uint64_t forest_digest = 0;  // FNV-1a 64 of the forest section
    std::uint64_t graph_digest = 0;   // FNV-1a 64 of the graph section

    bool operator==(const IndexMetadata&) const = default;
};

struct Index {
    RetrievalForest forest;
    MultiscaleGraph graph;
    IndexMetadata meta;
};

/// FNV-1a, 64-bit.
inline std::uint64_t fnv1a64(const unsigned char* data, std::size_t size) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::vector<unsigned char> serialize_forest(const RetrievalForest& forest, std::uint32_t dim);
RetrievalForest deserialize_forest(const std::vector<unsigned char>& bytes, std::uint32_t* dim_out);

std::vector<unsigned char> serialize_graph(const MultiscaleGraph& graph);
MultiscaleGraph deserialize_graph(const std::vector<unsigned char>& bytes);

/// Standalone files (same layout as the container sections). Writes go to
/// a temporary file first; the target never exists half-written.
void save_forest(const RetrievalForest& forest, std::uint32_t dim,
                 const std::filesystem::path& path);
RetrievalForest load_forest(const std::filesystem::path& path);

void save_graph(const MultiscaleGraph& graph, const std::filesystem::path& path);
MultiscaleGraph load_graph(const std::filesystem::path& path);

/// Container save/load. Digests are recomputed on save and verified on
/// load; any mismatch, bad magic, unknown version or out-of-bounds section
/// raises FormatError.
void save_index(const Index& index, const std::filesystem::path& path);
Index load_index(const std::filesystem::path& path);

}  // namespace navg
