#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dtscat/core/errors.hpp"

namespace dtscat::scatter {

// One multi-resolution pipeline: the image is resized to side x side and
// decomposed over `levels` scales.
struct Resolution {
    int side = 0;
    int levels = 0;
};

struct ScatterConfig {
    std::vector<Resolution> resolutions = {{64, 5}, {48, 4}};
    bool log_enabled = true;
    // k parameter per scale j = 1.. (coarsest scale of each pipeline is exempt);
    // shared between resolutions.
    std::vector<double> log_k = {1.1, 3.8, 3.8, 7.0};

    int max_levels() const {
        int m = 0;
        for (const auto& r : resolutions) m = std::max(m, r.levels);
        return m;
    }

    void validate() const {
        if (resolutions.empty()) throw usage_error("config: no resolutions");
        for (const auto& r : resolutions) {
            if (r.levels < 2) throw usage_error("config: levels must be >= 2");
            if (r.side < (1 << r.levels))
                throw usage_error("config: side " + std::to_string(r.side) +
                                  " too small for levels " + std::to_string(r.levels));
        }
        if (log_enabled) {
            if (int(log_k.size()) < max_levels() - 1)
                throw usage_error("config: need a log k for every scale below the coarsest");
            for (double k : log_k)
                if (!(k > 0)) throw usage_error("config: log k values must be positive");
        }
    }

    std::string cache_key() const {
        std::string s = log_enabled ? "log:" : "nolog:";
        for (const auto& r : resolutions)
            s += std::to_string(r.side) + ":" + std::to_string(r.levels) + ";";
        if (log_enabled)
            for (double k : log_k) s += std::to_string(k) + ",";
        return s;
    }
};

// Descriptor of one feature dimension.
struct FeatureDescriptor {
    uint8_t resolution = 0;  // index into ScatterConfig::resolutions
    uint8_t layer = 0;       // m = 0, 1, 2
    int8_t j1 = -1, j2 = -1;
    int8_t r1 = -1, r2 = -1;
    uint8_t cell_row = 0, cell_col = 0;
    uint8_t channel = 0;

    bool operator==(const FeatureDescriptor&) const = default;
};

}  // namespace dtscat::scatter
