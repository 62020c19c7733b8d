#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "dtscat/core/errors.hpp"

namespace dtscat {

// Row-major 2-D array of doubles. The unit of all wavelet processing.
struct Plane {
    int rows = 0;
    int cols = 0;
    std::vector<double> v;

    Plane() = default;
    Plane(int r, int c, double fill = 0.0) : rows(r), cols(c), v(size_t(r) * c, fill) {}

    double& at(int r, int c) { return v[size_t(r) * cols + c]; }
    double at(int r, int c) const { return v[size_t(r) * cols + c]; }
    double* row(int r) { return v.data() + size_t(r) * cols; }
    const double* row(int r) const { return v.data() + size_t(r) * cols; }
    size_t size() const { return v.size(); }

    bool all_finite() const {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    }
};

struct CPlane {
    int rows = 0;
    int cols = 0;
    std::vector<std::complex<double>> v;

    CPlane() = default;
    CPlane(int r, int c) : rows(r), cols(c), v(size_t(r) * c) {}

    std::complex<double>& at(int r, int c) { return v[size_t(r) * cols + c]; }
    std::complex<double> at(int r, int c) const { return v[size_t(r) * cols + c]; }
    size_t size() const { return v.size(); }
};

// 3-channel raster, planar storage, values nominally in [0,1].
struct RgbImage {
    int rows = 0;
    int cols = 0;
    std::vector<float> pixels;  // channel-planar: [c][r][col]

    RgbImage() = default;
    RgbImage(int r, int c) : rows(r), cols(c), pixels(size_t(3) * r * c, 0.f) {}

    float& at(int ch, int r, int c) { return pixels[(size_t(ch) * rows + r) * cols + c]; }
    float at(int ch, int r, int c) const { return pixels[(size_t(ch) * rows + r) * cols + c]; }

    Plane channel(int ch) const {
        Plane p(rows, cols);
        const float* src = pixels.data() + size_t(ch) * rows * cols;
        std::copy(src, src + size_t(rows) * cols, p.v.begin());
        return p;
    }
};

inline Plane transpose(const Plane& x) {
    Plane y(x.cols, x.rows);
    for (int r = 0; r < x.rows; ++r)
        for (int c = 0; c < x.cols; ++c) y.at(c, r) = x.at(r, c);
    return y;
}

inline double rel_l2_distance(const Plane& a, const Plane& b) {
    double num = 0, den = 0;
    for (size_t i = 0; i < a.v.size(); ++i) {
        double d = a.v[i] - b.v[i];
        num += d * d;
        den += a.v[i] * a.v[i];
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace dtscat
