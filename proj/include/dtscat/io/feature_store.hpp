#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "dtscat/core/matrix.hpp"
#include "dtscat/io/binary.hpp"
#include "dtscat/scatter/config.hpp"

namespace dtscat::io {

// Feature-store container ("SCTR"), little-endian throughout:
//   magic "SCTR" | u32 version | u64 config_hash | u32 vector_length |
//   u32 row_count | u32 flags | rows (row_count x vector_length f32) |
//   [index map: vector_length x 10 bytes]  (flags bit 2)
//   [labels: row_count x i32]              (flags bit 1)
// flags bit 0 records whether the log transformation layer was enabled.

inline constexpr uint32_t kStoreVersion = 1;
inline constexpr uint32_t kFlagLogEnabled = 1u << 0;
inline constexpr uint32_t kFlagHasLabels = 1u << 1;
inline constexpr uint32_t kFlagHasIndexMap = 1u << 2;

struct StoreHeader {
    uint64_t config_hash = 0;
    uint32_t vector_length = 0;
    uint32_t row_count = 0;
    uint32_t flags = 0;

    bool log_enabled() const { return flags & kFlagLogEnabled; }
};

inline uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t config_hash(const scatter::ScatterConfig& cfg) {
    return fnv1a64(cfg.cache_key());
}

namespace detail {

inline void write_header(std::ostream& out, const StoreHeader& h) {
    out.write("SCTR", 4);
    put_u32(out, kStoreVersion);
    put_u64(out, h.config_hash);
    put_u32(out, h.vector_length);
    put_u32(out, h.row_count);
    put_u32(out, h.flags);
}

inline StoreHeader read_header(std::istream& in, const std::string& name) {
    char magic[4];
    if (!in.read(magic, 4) || std::string(magic, 4) != "SCTR")
        throw data_error("store: bad magic in " + name);
    uint32_t version = get_u32(in);
    if (version != kStoreVersion)
        throw data_error("store: unsupported version " + std::to_string(version) + " in " + name);
    StoreHeader h;
    h.config_hash = get_u64(in);
    h.vector_length = get_u32(in);
    h.row_count = get_u32(in);
    h.flags = get_u32(in);
    return h;
}

constexpr size_t kHeaderBytes = 4 + 4 + 8 + 4 + 4 + 4;

}  // namespace detail

// Streaming writer: rows are appended in order, then the index map and
// labels finalize the file. The target path appears only on commit.
class FeatureStoreWriter {
  public:
    FeatureStoreWriter(const std::filesystem::path& path, uint32_t vector_length,
                       uint64_t cfg_hash, bool log_enabled)
        : file_(path), vector_length_(vector_length) {
        header_.config_hash = cfg_hash;
        header_.vector_length = vector_length;
        header_.flags = log_enabled ? kFlagLogEnabled : 0;
        detail::write_header(file_.stream(), header_);  // row_count patched on commit
    }

    void append_row(const float* row) {
        put_f32_array(file_.stream(), row, vector_length_);
        ++header_.row_count;
    }

    void finish(const scatter::IndexMap* map, const std::vector<int32_t>* labels) {
        auto& out = file_.stream();
        if (map) {
            if (map->entries.size() != vector_length_)
                throw usage_error("store: index map length mismatch");
            header_.flags |= kFlagHasIndexMap;
            for (const auto& d : map->entries) {
                char b[10] = {char(d.resolution), char(d.layer),   char(d.j1),
                              char(d.j2),         char(d.r1),      char(d.r2),
                              char(d.cell_row),   char(d.cell_col), char(d.channel),
                              0};
                out.write(b, 10);
            }
        }
        if (labels) {
            if (labels->size() != header_.row_count)
                throw usage_error("store: label count mismatch");
            header_.flags |= kFlagHasLabels;
            for (int32_t l : *labels) put_i32(out, l);
        }
        out.seekp(0);
        detail::write_header(out, header_);
        file_.commit();
    }

  private:
    AtomicFile file_;
    uint32_t vector_length_;
    StoreHeader header_;
};

class FeatureStoreReader {
  public:
    explicit FeatureStoreReader(const std::filesystem::path& path)
        : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw data_error("store: cannot open " + path.string());
        header_ = detail::read_header(in_, path.string());
    }

    const StoreHeader& header() const { return header_; }

    void read_row(uint32_t r, float* dst) {
        seek_row(r);
        get_f32_array(in_, dst, header_.vector_length);
    }

    // full matrix with labels when present
    FeatureMatrix read_all() {
        FeatureMatrix m;
        m.rows = header_.row_count;
        m.cols = header_.vector_length;
        m.data.resize(size_t(m.rows) * size_t(m.cols));
        seek_row(0);
        get_f32_array(in_, m.data.data(), m.data.size());
        m.labels = read_labels();
        return m;
    }

    // stream rows, keeping only the given columns
    FeatureMatrix read_columns(const std::vector<int>& columns) {
        for (int c : columns)
            if (c < 0 || uint32_t(c) >= header_.vector_length)
                throw usage_error("store: column index out of range");
        FeatureMatrix m;
        m.rows = header_.row_count;
        m.cols = int64_t(columns.size());
        m.data.resize(size_t(m.rows) * columns.size());
        std::vector<float> row(header_.vector_length);
        seek_row(0);
        for (uint32_t r = 0; r < header_.row_count; ++r) {
            get_f32_array(in_, row.data(), row.size());
            float* dst = m.data.data() + size_t(r) * columns.size();
            for (size_t k = 0; k < columns.size(); ++k) dst[k] = row[size_t(columns[k])];
        }
        m.labels = read_labels();
        return m;
    }

    std::optional<scatter::IndexMap> read_index_map() {
        if (!(header_.flags & kFlagHasIndexMap)) return std::nullopt;
        in_.clear();
        in_.seekg(std::streamoff(detail::kHeaderBytes +
                                 size_t(header_.row_count) * header_.vector_length * 4));
        scatter::IndexMap map;
        map.entries.resize(header_.vector_length);
        for (auto& d : map.entries) {
            char b[10];
            if (!in_.read(b, 10)) throw data_error("store: truncated index map");
            d = {uint8_t(b[0]), uint8_t(b[1]), int8_t(b[2]),  int8_t(b[3]), int8_t(b[4]),
                 int8_t(b[5]),  uint8_t(b[6]), uint8_t(b[7]), uint8_t(b[8])};
        }
        return map;
    }

    std::vector<int32_t> read_labels() {
        if (!(header_.flags & kFlagHasLabels)) return {};
        size_t off = detail::kHeaderBytes + size_t(header_.row_count) * header_.vector_length * 4;
        if (header_.flags & kFlagHasIndexMap) off += size_t(header_.vector_length) * 10;
        in_.clear();
        in_.seekg(std::streamoff(off));
        std::vector<int32_t> labels(header_.row_count);
        for (auto& l : labels) l = get_i32(in_);
        return labels;
    }

  private:
    void seek_row(uint32_t r) {
        in_.clear();
        in_.seekg(std::streamoff(detail::kHeaderBytes +
                                 size_t(r) * header_.vector_length * 4));
    }

    std::filesystem::path path_;
    std::ifstream in_;
    StoreHeader header_;
};

}  // namespace dtscat::io
