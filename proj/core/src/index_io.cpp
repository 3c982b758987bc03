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

#include "navg/index_io.hpp"

#include <cstring>
#include <fstream>

#include "navg/error.hpp"

namespace navg {

namespace {

constexpr char kForestMagic[4] = {'N', 'V', 'G', 'F'};
constexpr char kGraphMagic[4] = {'N', 'V', 'G', 'G'};
constexpr char kIndexMagic[4] = {'N', 'V', 'G', '1'};
constexpr std::uint32_t kFormatVersion = 1;

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const unsigned char*>(p);
        buf_.insert(buf_.end(), c, c + n);
    }
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<unsigned char>(v >> (8 * i)));
    }
    void f32(float v) {
        std::uint32_t u;
        std::memcpy(&u, &v, 4);
        u32(u);
    }
    void f64(double v) {
        std::uint64_t u;
        std::memcpy(&u, &v, 8);
        u64(u);
    }
    void magic(const char m[4]) { bytes(m, 4); }

    std::vector<unsigned char> take() { return std::move(buf_); }

private:
    std::vector<unsigned char> buf_;
};

class Reader {
public:
    Reader(const unsigned char* data, std::size_t size, std::string origin)
        : data_(data), size_(size), origin_(std::move(origin)) {}

    void need(std::size_t n) const {
        if (size_ - off_ < n) {
            throw FormatError(origin_ + ": truncated at byte offset " + std::to_string(off_));
        }
    }
    std::uint8_t u8() {
        need(1);
        return data_[off_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[off_ + i]) << (8 * i);
        off_ += 4;
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[off_ + i]) << (8 * i);
        off_ += 8;
        return v;
    }
    float f32() {
        const std::uint32_t u = u32();
        float v;
        std::memcpy(&v, &u, 4);
        return v;
    }
    double f64() {
        const std::uint64_t u = u64();
        double v;
        std::memcpy(&v, &u, 8);
        return v;
    }
    void expect_magic(const char m[4], const char* kind) {
        need(4);
        if (std::memcmp(data_ + off_, m, 4) != 0) {
            throw FormatError(origin_ + ": wrong type tag, expected " + std::string(m, 4) + " (" +
                              kind + ")");
        }
        off_ += 4;
    }
    std::size_t offset() const { return off_; }
    bool exhausted() const { return off_ == size_; }
    const std::string& origin() const { return origin_; }

private:
    const unsigned char* data_;
    std::size_t size_;
    std::size_t off_ = 0;
    std::string origin_;
};

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
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

void write_file_atomic(const std::vector<unsigned char>& bytes,
                       const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw IoError("write failed on " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

void write_forest_body(Writer& w, const RetrievalForest& forest, std::uint32_t dim) {
    w.magic(kForestMagic);
    w.u32(kFormatVersion);
    w.u32(dim);
    const ForestConfig& c = forest.config;
    w.u32(c.num_trees);
    w.u32(c.max_depth);
    w.u32(c.candidates_per_node);
    w.u32(c.min_leaf);
    w.u8(static_cast<std::uint8_t>(c.entropy_mode));
    w.u8(c.bagging ? 1 : 0);
    w.f64(c.ridge);
    w.u64(c.rng_seed);
    w.u32(static_cast<std::uint32_t>(forest.trees.size()));
    for (const Tree& tree : forest.trees) {
        w.u64(tree.nodes.size());
        w.u64(tree.bucket_ids.size());
        for (const TreeNode& nd : tree.nodes) {
            w.u32(nd.split.first_dim);
            w.u32(nd.split.second_dim);
            w.f32(nd.split.threshold);
            w.i32(nd.left);
            w.i32(nd.right);
            w.u32(nd.bucket_begin);
            w.u32(nd.bucket_count);
        }
        for (const std::uint32_t id : tree.bucket_ids) w.u32(id);
    }
}

RetrievalForest read_forest_body(Reader& r, std::uint32_t* dim_out) {
    r.expect_magic(kForestMagic, "forest");
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw FormatError(r.origin() + ": unsupported forest format version " +
                          std::to_string(version));
    }
    RetrievalForest forest;
    forest.dim = r.u32();
    if (dim_out) *dim_out = forest.dim;
    ForestConfig& c = forest.config;
    c.num_trees = r.u32();
    c.max_depth = r.u32();
    c.candidates_per_node = r.u32();
    c.min_leaf = r.u32();
    c.entropy_mode = static_cast<EntropyMode>(r.u8());
    c.bagging = r.u8() != 0;
    c.ridge = r.f64();
    c.rng_seed = r.u64();
    const std::uint32_t tree_count = r.u32();
    forest.trees.resize(tree_count);
    for (Tree& tree : forest.trees) {
        const std::uint64_t node_count = r.u64();
        const std::uint64_t bucket_len = r.u64();
        tree.nodes.resize(node_count);
        for (TreeNode& nd : tree.nodes) {
            nd.split.first_dim = r.u32();
            nd.split.second_dim = r.u32();
            nd.split.threshold = r.f32();
            nd.left = r.i32();
            nd.right = r.i32();
            nd.bucket_begin = r.u32();
            nd.bucket_count = r.u32();
        }
        tree.bucket_ids.resize(bucket_len);
        for (std::uint32_t& id : tree.bucket_ids) id = r.u32();
    }
    return forest;
}

void write_graph_body(Writer& w, const MultiscaleGraph& graph) {
    w.magic(kGraphMagic);
    w.u32(kFormatVersion);
    w.u8(static_cast<std::uint8_t>(graph.build_metric));
    w.u32(graph.k);
    w.u64(graph.rng_seed);
    w.u64(graph.dataset_size);
    w.u32(static_cast<std::uint32_t>(graph.levels.size()));
    for (const double f : graph.fractions) w.f64(f);
    for (const LevelGraph& level : graph.levels) {
        w.u64(level.vertices.size());
        w.u32(level.degree);
        for (const std::uint32_t v : level.vertices) w.u32(v);
        for (const std::uint32_t v : level.adjacency) w.u32(v);
    }
}

MultiscaleGraph read_graph_body(Reader& r) {
    r.expect_magic(kGraphMagic, "graph");
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw FormatError(r.origin() + ": unsupported graph format version " +
                          std::to_string(version));
    }
    MultiscaleGraph graph;
    graph.build_metric = static_cast<Metric>(r.u8());
    graph.k = r.u32();
    graph.rng_seed = r.u64();
    graph.dataset_size = r.u64();
    const std::uint32_t level_count = r.u32();
    graph.fractions.resize(level_count);
    for (double& f : graph.fractions) f = r.f64();
    graph.levels.resize(level_count);
    for (LevelGraph& level : graph.levels) {
        const std::uint64_t vertex_count = r.u64();
        level.degree = r.u32();
        level.vertices.resize(vertex_count);
        for (std::uint32_t& v : level.vertices) v = r.u32();
        level.adjacency.resize(vertex_count * level.degree);
        for (std::uint32_t& v : level.adjacency) v = r.u32();
        level.rebuild_position(graph.dataset_size);
    }
    return graph;
}

}  // namespace

std::vector<unsigned char> serialize_forest(const RetrievalForest& forest, std::uint32_t dim) {
    Writer w;
    write_forest_body(w, forest, dim);
    return w.take();
}

RetrievalForest deserialize_forest(const std::vector<unsigned char>& bytes,
                                   std::uint32_t* dim_out) {
    Reader r(bytes.data(), bytes.size(), "forest section");
    return read_forest_body(r, dim_out);
}

std::vector<unsigned char> serialize_graph(const MultiscaleGraph& graph) {
    Writer w;
    write_graph_body(w, graph);
    return w.take();
}

MultiscaleGraph deserialize_graph(const std::vector<unsigned char>& bytes) {
    Reader r(bytes.data(), bytes.size(), "graph section");
    return read_graph_body(r);
}

void save_forest(const RetrievalForest& forest, std::uint32_t dim,
                 const std::filesystem::path& path) {
    write_file_atomic(serialize_forest(forest, dim), path);
}

RetrievalForest load_forest(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    Reader r(bytes.data(), bytes.size(), path.string());
    return read_forest_body(r, nullptr);
}

void save_graph(const MultiscaleGraph& graph, const std::filesystem::path& path) {
    write_file_atomic(serialize_graph(graph), path);
}

MultiscaleGraph load_graph(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    Reader r(bytes.data(), bytes.size(), path.string());
    return read_graph_body(r);
}

void save_index(const Index& index, const std::filesystem::path& path) {
    const auto forest_bytes = serialize_forest(index.forest, index.forest.dim);
    const auto graph_bytes = serialize_graph(index.graph);

    Writer meta;
    meta.u64(index.meta.dataset_size);
    meta.u32(index.meta.dim);
    meta.u8(static_cast<std::uint8_t>(index.meta.build_metric));
    meta.u64(index.meta.rng_seed);
    meta.u64(fnv1a64(forest_bytes.data(), forest_bytes.size()));
    meta.u64(fnv1a64(graph_bytes.data(), graph_bytes.size()));
    const auto meta_bytes = meta.take();

    Writer w;
    w.magic(kIndexMagic);
    w.u32(kFormatVersion);
    w.u32(3);  // section count
    // Section table: tag, offset, size. Offsets are from file start.
    const std::size_t header_size = 4 + 4 + 4 + 3 * (4 + 8 + 8);
    std::size_t off = header_size;
    const struct {
        const char* tag;
        const std::vector<unsigned char>* body;
    } sections[3] = {{"META", &meta_bytes}, {"FRST", &forest_bytes}, {"GRPH", &graph_bytes}};
    for (const auto& s : sections) {
        w.bytes(s.tag, 4);
        w.u64(off);
        w.u64(s.body->size());
        off += s.body->size();
    }
    for (const auto& s : sections) w.bytes(s.body->data(), s.body->size());
    write_file_atomic(w.take(), path);
}

Index load_index(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    Reader r(bytes.data(), bytes.size(), path.string());
    r.expect_magic(kIndexMagic, "index container");
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion) {
        throw FormatError(path.string() + ": unsupported container version " +
                          std::to_string(version));
    }
    const std::uint32_t section_count = r.u32();
    if (section_count != 3) {
        throw FormatError(path.string() + ": expected 3 sections, found " +
                          std::to_string(section_count));
    }

    struct Section {
        char tag[5] = {0};
        std::uint64_t offset = 0;
        std::uint64_t size = 0;
    };
    Section sections[3];
    for (auto& s : sections) {
        r.need(4);
        std::memcpy(s.tag, bytes.data() + r.offset(), 4);
        (void)r.u32();
        s.offset = r.u64();
        s.size = r.u64();
        if (s.offset > bytes.size() || s.size > bytes.size() - s.offset) {
            throw FormatError(path.string() + ": section " + s.tag + " out of bounds");
        }
    }

    auto find = [&](const char* tag) -> const Section& {
        for (const auto& s : sections) {
            if (std::strcmp(s.tag, tag) == 0) return s;
        }
        throw FormatError(path.string() + ": missing section " + std::string(tag));
    };

    const Section& meta_sec = find("META");
    const Section& forest_sec = find("FRST");
    const Section& graph_sec = find("GRPH");

    Index index;
    {
        Reader mr(bytes.data() + meta_sec.offset, meta_sec.size, path.string() + " [META]");
        index.meta.dataset_size = mr.u64();
        index.meta.dim = mr.u32();
        index.meta.build_metric = static_cast<Metric>(mr.u8());
        index.meta.rng_seed = mr.u64();
        index.meta.forest_digest = mr.u64();
        index.meta.graph_digest = mr.u64();
    }

    const std::uint64_t forest_digest = fnv1a64(bytes.data() + forest_sec.offset, forest_sec.size);
    if (forest_digest != index.meta.forest_digest) {
        throw FormatError(path.string() + ": forest section digest mismatch");
    }
    const std::uint64_t graph_digest = fnv1a64(bytes.data() + graph_sec.offset, graph_sec.size);
    if (graph_digest != index.meta.graph_digest) {
        throw FormatError(path.string() + ": graph section digest mismatch");
    }

    {
        Reader fr(bytes.data() + forest_sec.offset, forest_sec.size, path.string() + " [FRST]");
        index.forest = read_forest_body(fr, nullptr);
    }
    {
        Reader gr(bytes.data() + graph_sec.offset, graph_sec.size, path.string() + " [GRPH]");
        index.graph = read_graph_body(gr);
    }
    return index;
}

}  // namespace navg
