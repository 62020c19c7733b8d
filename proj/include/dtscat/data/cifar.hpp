#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "dtscat/core/errors.hpp"
#include "dtscat/core/plane.hpp"
#include "dtscat/core/rng.hpp"

namespace dtscat::data {

// Labeled raster set in the native byte form; pixels convert to [0,1] floats
// on access.
struct LabeledImageSet {
    int class_count = 10;
    std::string split;                // "train" or "test"
    std::vector<uint8_t> pixels;      // per image: 3072 bytes, channel-planar
    std::vector<int32_t> labels;

    size_t count() const { return labels.size(); }

    RgbImage image(size_t i) const {
        RgbImage im(32, 32);
        const uint8_t* src = pixels.data() + i * 3072;
        for (size_t k = 0; k < 3072; ++k) im.pixels[k] = float(src[k]) / 255.0f;
        return im;
    }
};

namespace detail {

inline void load_batch(const std::filesystem::path& file, int variant, LabeledImageSet& out) {
    const size_t record = variant == 10 ? 3073 : 3074;
    std::ifstream in(file, std::ios::binary | std::ios::ate);
    if (!in) throw data_error("cifar: missing file " + file.string());
    const auto size = size_t(in.tellg());
    if (size == 0 || size % record != 0)
        throw data_error("cifar: truncated file " + file.string() + ": " +
                         std::to_string(size) + " bytes is not a whole number of " +
                         std::to_string(record) + "-byte records (" +
                         std::to_string(size / record) + " full records, " +
                         std::to_string(size % record) + " stray bytes)");
    in.seekg(0);
    const size_t n = size / record;
    std::vector<uint8_t> buf(record);
    for (size_t i = 0; i < n; ++i) {
        if (!in.read(reinterpret_cast<char*>(buf.data()), std::streamsize(record)))
            throw data_error("cifar: short read in " + file.string() + " at byte offset " +
                             std::to_string(i * record));
        // CIFAR-100 records carry a coarse label byte first; the fine label follows
        const uint8_t label = variant == 10 ? buf[0] : buf[1];
        if (label >= out.class_count)
            throw data_error("cifar: label " + std::to_string(int(label)) + " out of range in " +
                             file.string() + " at byte offset " + std::to_string(i * record));
        out.labels.push_back(label);
        const size_t off = variant == 10 ? 1 : 2;
        out.pixels.insert(out.pixels.end(), buf.begin() + long(off), buf.end());
    }
}

}  // namespace detail

// Standard CIFAR binary batch layout. variant selects CIFAR-10 or CIFAR-100.
inline std::pair<LabeledImageSet, LabeledImageSet> load_cifar(const std::filesystem::path& dir,
                                                              int variant) {
    if (variant != 10 && variant != 100) throw usage_error("cifar: variant must be 10 or 100");
    LabeledImageSet train, test;
    train.class_count = test.class_count = variant;
    train.split = "train";
    test.split = "test";
    if (variant == 10) {
        for (int b = 1; b <= 5; ++b)
            detail::load_batch(dir / ("data_batch_" + std::to_string(b) + ".bin"), 10, train);
        detail::load_batch(dir / "test_batch.bin", 10, test);
    } else {
        detail::load_batch(dir / "train.bin", 100, train);
        detail::load_batch(dir / "test.bin", 100, test);
    }
    return {std::move(train), std::move(test)};
}

// Writes records in the standard batch layout (test helper and surrogate
// data generator).
inline void write_cifar_batch(const std::filesystem::path& file, const LabeledImageSet& set,
                              int variant) {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw data_error("cifar: cannot write " + file.string());
    for (size_t i = 0; i < set.count(); ++i) {
        if (variant == 100) out.put(char(0));  // coarse label placeholder
        out.put(char(set.labels[i]));
        out.write(reinterpret_cast<const char*>(set.pixels.data() + i * 3072), 3072);
    }
}

// Exactly total/class_count images per class, drawn without replacement with
// the splitmix64 stream; identical index sets for identical seeds.
inline LabeledImageSet stratified_subsample(const LabeledImageSet& set, size_t total,
                                            uint64_t seed) {
    if (total == 0 || total % size_t(set.class_count) != 0)
        throw usage_error("subsample: total " + std::to_string(total) +
                          " is not divisible by " + std::to_string(set.class_count));
    const size_t per = total / size_t(set.class_count);
    std::vector<std::vector<uint32_t>> by_class(size_t(set.class_count));
    for (size_t i = 0; i < set.count(); ++i) by_class[size_t(set.labels[i])].push_back(uint32_t(i));

    std::vector<uint32_t> chosen;
    for (int cls = 0; cls < set.class_count; ++cls) {
        auto& idx = by_class[size_t(cls)];
        if (idx.size() < per)
            throw data_error("subsample: class " + std::to_string(cls) + " has only " +
                             std::to_string(idx.size()) + " rows, need " + std::to_string(per));
        SplitMix64 g(mix_seed(seed, uint64_t(cls)));
        for (size_t k = 0; k < per; ++k) {
            size_t j = k + size_t(g.below(idx.size() - k));
            std::swap(idx[k], idx[j]);
            chosen.push_back(idx[k]);
        }
    }
    std::sort(chosen.begin(), chosen.end());

    LabeledImageSet out;
    out.class_count = set.class_count;
    out.split = set.split;
    out.labels.reserve(chosen.size());
    out.pixels.reserve(chosen.size() * 3072);
    for (uint32_t i : chosen) {
        out.labels.push_back(set.labels[i]);
        out.pixels.insert(out.pixels.end(), set.pixels.begin() + size_t(i) * 3072,
                          set.pixels.begin() + size_t(i + 1) * 3072);
    }
    return out;
}

}  // namespace dtscat::data
