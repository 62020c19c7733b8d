#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dtscat/core/errors.hpp"

namespace dtscat::io {

// Explicit little-endian primitives shared by the binary file formats.

inline void put_u32(std::ostream& out, uint32_t v) {
    char b[4] = {char(v & 0xff), char((v >> 8) & 0xff), char((v >> 16) & 0xff),
                 char((v >> 24) & 0xff)};
    out.write(b, 4);
}

inline void put_u64(std::ostream& out, uint64_t v) {
    put_u32(out, uint32_t(v & 0xffffffffu));
    put_u32(out, uint32_t(v >> 32));
}

inline void put_i32(std::ostream& out, int32_t v) { put_u32(out, uint32_t(v)); }

inline void put_f32(std::ostream& out, float v) {
    uint32_t u;
    std::memcpy(&u, &v, 4);
    put_u32(out, u);
}

inline void put_f64(std::ostream& out, double v) {
    uint64_t u;
    std::memcpy(&u, &v, 8);
    put_u64(out, u);
}

inline uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4)) throw data_error("io: unexpected end of file");
    return uint32_t(b[0]) | uint32_t(b[1]) << 8 | uint32_t(b[2]) << 16 | uint32_t(b[3]) << 24;
}

inline uint64_t get_u64(std::istream& in) {
    uint64_t lo = get_u32(in);
    uint64_t hi = get_u32(in);
    return lo | (hi << 32);
}

inline int32_t get_i32(std::istream& in) { return int32_t(get_u32(in)); }

inline float get_f32(std::istream& in) {
    uint32_t u = get_u32(in);
    float v;
    std::memcpy(&v, &u, 4);
    return v;
}

inline double get_f64(std::istream& in) {
    uint64_t u = get_u64(in);
    double v;
    std::memcpy(&v, &u, 8);
    return v;
}

// f32 array fast path (little-endian hosts write/read in bulk)
inline void put_f32_array(std::ostream& out, const float* v, size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(v), std::streamsize(n * 4));
    } else {
        for (size_t i = 0; i < n; ++i) put_f32(out, v[i]);
    }
}

inline void get_f32_array(std::istream& in, float* v, size_t n) {
    if constexpr (std::endian::native == std::endian::little) {
        if (!in.read(reinterpret_cast<char*>(v), std::streamsize(n * 4)))
            throw data_error("io: unexpected end of file");
    } else {
        for (size_t i = 0; i < n; ++i) v[i] = get_f32(in);
    }
}

// write-to-temp-then-rename so failed runs leave no partial artifacts
class AtomicFile {
  public:
    explicit AtomicFile(const std::filesystem::path& target)
        : target_(target), tmp_(target.string() + ".tmp") {
        out_.open(tmp_, std::ios::binary | std::ios::trunc);
        if (!out_) throw data_error("io: cannot open " + tmp_.string() + " for writing");
    }

    ~AtomicFile() {
        if (!committed_) {
            out_.close();
            std::error_code ec;
            std::filesystem::remove(tmp_, ec);
        }
    }

    std::ostream& stream() { return out_; }

    void commit() {
        out_.flush();
        if (!out_) throw data_error("io: write failure on " + tmp_.string());
        out_.close();
        std::filesystem::rename(tmp_, target_);
        committed_ = true;
    }

  private:
    std::filesystem::path target_, tmp_;
    std::ofstream out_;
    bool committed_ = false;
};

}  // namespace dtscat::io
