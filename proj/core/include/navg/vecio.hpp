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

#include "navg/dataset.hpp"

// TexMex .fvecs / .ivecs readers and writers.
//
// Each record is a little-endian int32 count d followed by d little-endian
// 32-bit payload values (IEEE-754 floats for fvecs, signed ints for ivecs).
// All records in one file must share d.

namespace navg {

/// Parse an entire fvecs file. An empty file yields an empty dataset.
/// Throws FormatError on d <= 0, inconsistent d, or truncation (the
/// message carries the byte offset); IoError if the file cannot be read.
VectorDataset load_fvecs(const std::filesystem::path& path);

/// Write a dataset as fvecs. Round-trips bit-exactly.
void save_fvecs(const VectorDataset& ds, const std::filesystem::path& path);

/// Parse an ivecs file into one id list per record.
std::vector<std::vector<std::int32_t>> load_ivecs(const std::filesystem::path& path);

/// Write id lists as ivecs. All lists must have equal length.
void save_ivecs(const std::vector<std::vector<std::int32_t>>& lists,
                const std::filesystem::path& path);

}  // namespace navg
