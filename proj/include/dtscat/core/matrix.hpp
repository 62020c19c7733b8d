#pragma once

#include <cstdint>
#include <vector>

namespace dtscat {

// Row-major float matrix of feature rows, optionally with per-row labels.
struct FeatureMatrix {
    int64_t rows = 0;
    int64_t cols = 0;
    std::vector<float> data;
    std::vector<int32_t> labels;

    float* row(int64_t r) { return data.data() + r * cols; }
    const float* row(int64_t r) const { return data.data() + r * cols; }
};

}  // namespace dtscat
