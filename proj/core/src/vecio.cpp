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

#include "navg/vecio.hpp"

#include <cstring>
#include <fstream>

#include "navg/error.hpp"

namespace navg {

namespace {

std::int32_t read_i32_le(const unsigned char* p) {
    return static_cast<std::int32_t>(static_cast<std::uint32_t>(p[0]) |
                                     (static_cast<std::uint32_t>(p[1]) << 8) |
                                     (static_cast<std::uint32_t>(p[2]) << 16) |
                                     (static_cast<std::uint32_t>(p[3]) << 24));
}

void write_i32_le(std::ostream& out, std::int32_t v) {
    const auto u = static_cast<std::uint32_t>(v);
    const unsigned char b[4] = {
        static_cast<unsigned char>(u & 0xFF),
        static_cast<unsigned char>((u >> 8) & 0xFF),
        static_cast<unsigned char>((u >> 16) & 0xFF),
        static_cast<unsigned char>((u >> 24) & 0xFF),
    };
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_f32_le(std::ostream& out, float v) {
    std::uint32_t u;
    std::memcpy(&u, &v, 4);
    write_i32_le(out, static_cast<std::int32_t>(u));
}

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const auto size = static_cast<std::size_t>(in.tellg());
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> bytes(size);
    if (size > 0) in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (!in) throw IoError("short read on " + path.string());
    return bytes;
}

// Shared record walker for both payload types (4 bytes per element).
template <typename OnRecord>
void parse_vecs(const std::filesystem::path& path, const std::vector<unsigned char>& bytes,
                OnRecord&& on_record) {
    std::size_t off = 0;
    std::int32_t dim = -1;
    while (off < bytes.size()) {
        if (bytes.size() - off < 4) {
            throw FormatError(path.string() + ": truncated record header at byte offset " +
                              std::to_string(off));
        }
        const std::int32_t d = read_i32_le(bytes.data() + off);
        if (d <= 0) {
            throw FormatError(path.string() + ": non-positive dimension " + std::to_string(d) +
                              " at byte offset " + std::to_string(off));
        }
        if (dim >= 0 && d != dim) {
            throw FormatError(path.string() + ": inconsistent dimension (" + std::to_string(dim) +
                              " then " + std::to_string(d) + ") at byte offset " +
                              std::to_string(off));
        }
        dim = d;
        off += 4;
        const std::size_t payload = static_cast<std::size_t>(d) * 4;
        if (bytes.size() - off < payload) {
            throw FormatError(path.string() + ": truncated record payload at byte offset " +
                              std::to_string(off) + " (need " + std::to_string(payload) +
                              " bytes, have " + std::to_string(bytes.size() - off) + ")");
        }
        on_record(static_cast<std::uint32_t>(d), bytes.data() + off);
        off += payload;
    }
}

}  // namespace

VectorDataset load_fvecs(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    std::vector<float> data;
    std::uint32_t dim = 0;
    parse_vecs(path, bytes, [&](std::uint32_t d, const unsigned char* payload) {
        dim = d;
        const std::size_t start = data.size();
        data.resize(start + d);
        // Components are little-endian IEEE-754; reassemble explicitly so the
        // loader is byte-order independent.
        for (std::uint32_t i = 0; i < d; ++i) {
            const std::uint32_t u =
                static_cast<std::uint32_t>(read_i32_le(payload + i * 4));
            float f;
            std::memcpy(&f, &u, 4);
            data[start + i] = f;
        }
    });
    return VectorDataset(dim, std::move(data));
}

void save_fvecs(const VectorDataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (std::size_t i = 0; i < ds.size(); ++i) {
        write_i32_le(out, static_cast<std::int32_t>(ds.dim()));
        const float* row = ds.row(static_cast<std::uint32_t>(i));
        for (std::uint32_t d = 0; d < ds.dim(); ++d) write_f32_le(out, row[d]);
    }
    if (!out) throw IoError("write failed on " + path.string());
}

std::vector<std::vector<std::int32_t>> load_ivecs(const std::filesystem::path& path) {
    const auto bytes = read_all(path);
    std::vector<std::vector<std::int32_t>> lists;
    parse_vecs(path, bytes, [&](std::uint32_t d, const unsigned char* payload) {
        std::vector<std::int32_t> row(d);
        for (std::uint32_t i = 0; i < d; ++i) row[i] = read_i32_le(payload + i * 4);
        lists.push_back(std::move(row));
    });
    return lists;
}

void save_ivecs(const std::vector<std::vector<std::int32_t>>& lists,
                const std::filesystem::path& path) {
    for (const auto& row : lists) {
        if (row.size() != lists.front().size()) {
            throw std::invalid_argument("save_ivecs: record length mismatch");
        }
        if (row.empty()) throw std::invalid_argument("save_ivecs: empty record");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    for (const auto& row : lists) {
        write_i32_le(out, static_cast<std::int32_t>(row.size()));
        for (const std::int32_t v : row) write_i32_le(out, v);
    }
    if (!out) throw IoError("write failed on " + path.string());
}

}  // namespace navg
