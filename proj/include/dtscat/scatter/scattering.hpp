#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <vector>

#include "dtscat/core/plane.hpp"
#include "dtscat/dtcwt/transform.hpp"
#include "dtscat/scatter/config.hpp"

namespace dtscat::scatter {

struct EnvelopePlane {
    int j = 0;  // scale
    int r = 0;  // orientation index, 15 deg .. 165 deg
    Plane values;
};

// Complex magnitude of every oriented subband.
inline std::vector<EnvelopePlane> modulus(const dtcwt::Pyramid& p) {
    std::vector<EnvelopePlane> out;
    out.reserve(size_t(p.levels) * 6);
    for (int j = 1; j <= p.levels; ++j) {
        for (int r = 0; r < 6; ++r) {
            const auto& z = p.bands[j - 1][r];
            EnvelopePlane e{j, r, Plane(z.rows, z.cols)};
            for (size_t i = 0; i < z.v.size(); ++i) e.values.v[i] = std::abs(z.v[i]);
            out.push_back(std::move(e));
        }
    }
    return out;
}

inline Plane log_transform(const Plane& env, double k) {
    if (!(k > 0)) throw numeric_error("log_transform: k must be positive");
    Plane out(env.rows, env.cols);
    for (size_t i = 0; i < env.v.size(); ++i) out.v[i] = std::log(env.v[i] + k);
    return out;
}

struct LogParamEntry {
    int scale = 0;
    double k = 0;                // chosen
    double mean_median_gap = 0;  // at the chosen k
    double gap_at_grid_min = 0;  // at the smallest candidate k
    double skew_before = 0;
    double skew_after = 0;
};

struct LogParamReport {
    std::vector<LogParamEntry> scales;
};

inline std::vector<double> default_k_grid() {
    // geometric, 25 candidates spanning 0.1 .. 20
    std::vector<double> g(25);
    for (int i = 0; i < 25; ++i) g[i] = 0.1 * std::pow(200.0, i / 24.0);
    return g;
}

namespace detail {

inline double median_of(std::vector<double>& tmp) {
    const size_t n = tmp.size();
    auto mid = tmp.begin() + n / 2;
    std::nth_element(tmp.begin(), mid, tmp.end());
    double hi = *mid;
    if (n % 2 == 1) return hi;
    double lo = *std::max_element(tmp.begin(), mid);
    return 0.5 * (lo + hi);
}

inline double skewness(const std::vector<double>& s) {
    double n = double(s.size()), mu = 0;
    for (double x : s) mu += x;
    mu /= n;
    double m2 = 0, m3 = 0;
    for (double x : s) {
        double d = x - mu;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= n;
    m3 /= n;
    return m2 > 0 ? m3 / std::pow(m2, 1.5) : 0.0;
}

}  // namespace detail

// Pick the grid k minimising |mean - median| of log(samples + k).
// Ties break toward the smallest k.
inline std::pair<double, LogParamEntry> tune_log_param(const std::vector<double>& samples,
                                                       const std::vector<double>& grid) {
    if (samples.empty()) throw data_error("tune_log_param: empty sample set");
    if (grid.empty()) throw data_error("tune_log_param: empty candidate grid");
    std::vector<double> sorted_grid = grid;
    std::sort(sorted_grid.begin(), sorted_grid.end());
    if (!(sorted_grid.front() > 0)) throw numeric_error("tune_log_param: k must be positive");

    LogParamEntry e;
    e.skew_before = detail::skewness(samples);
    double best_gap = 0, best_k = 0;
    std::vector<double> logs(samples.size());
    bool first = true;
    for (double k : sorted_grid) {
        double mean = 0;
        for (size_t i = 0; i < samples.size(); ++i) {
            logs[i] = std::log(samples[i] + k);
            mean += logs[i];
        }
        mean /= double(samples.size());
        std::vector<double> tmp = logs;
        double gap = std::abs(mean - detail::median_of(tmp));
        if (first) e.gap_at_grid_min = gap;
        if (first || gap < best_gap) {
            best_gap = gap;
            best_k = k;
        }
        first = false;
    }
    e.k = best_k;
    e.mean_median_gap = best_gap;
    std::vector<double> after(samples.size());
    for (size_t i = 0; i < samples.size(); ++i) after[i] = std::log(samples[i] + best_k);
    e.skew_after = detail::skewness(after);
    return {best_k, e};
}

// ------------------------------------------------------------- smoothing ---

namespace detail {

inline std::vector<double> smoothing_kernel(const dtcwt::FilterSet& f) {
    std::vector<double> s(f.qshift_lowpass_a.size());
    for (size_t i = 0; i < s.size(); ++i)
        s[i] = 0.5 * (f.qshift_lowpass_a[i] + f.qshift_lowpass_b[i]);
    return s;
}

inline Plane smooth_rows(const Plane& x, const std::vector<double>& s, bool decimate) {
    const int nt = int(s.size());
    Plane y(decimate ? x.rows / 2 : x.rows, x.cols);
    for (int i = 0; i < y.rows; ++i) {
        double* out = y.row(i);
        const int base = decimate ? 2 * i : i;
        for (int m = 0; m < nt; ++m) {
            const double* src = x.row(dtcwt::ext_hs(x.rows, base + 7 - m));
            for (int c = 0; c < x.cols; ++c) out[c] += s[m] * src[c];
        }
    }
    return y;
}

inline Plane smooth2d(const Plane& x, const std::vector<double>& s, bool decimate) {
    return transpose(smooth_rows(transpose(smooth_rows(x, s, decimate)), s, decimate));
}

inline Plane upsample2x_linear(const Plane& x) {
    Plane y(2 * x.rows, 2 * x.cols);
    for (int r = 0; r < y.rows; ++r) {
        int r0 = r / 2;
        int r1 = std::min(r0 + (r % 2), x.rows - 1);
        for (int c = 0; c < y.cols; ++c) {
            int c0 = c / 2;
            int c1 = std::min(c0 + (c % 2), x.cols - 1);
            y.at(r, c) = 0.25 * (x.at(r0, c0) + x.at(r0, c1) + x.at(r1, c0) + x.at(r1, c1));
        }
    }
    return y;
}

}  // namespace detail

// Smooth a plane sampled at spacing 2^j down to the invariance output grid at
// spacing 2^(J-1) (the dual-tree scaling grid): J-1-j decimating lowpass
// steps followed by one plain lowpass. The coarsest scale j = J is already
// fully smoothed and is only resampled onto the common grid.
inline Plane smooth_to_invariance(const Plane& plane, int current_scale, int target_scale,
                                  const dtcwt::FilterSet& f) {
    if (target_scale < current_scale)
        throw dimension_error("smooth_to_invariance: target scale below current scale");
    if (current_scale == target_scale) return detail::upsample2x_linear(plane);
    const auto s = detail::smoothing_kernel(f);
    Plane p = plane;
    for (int step = 0; step < target_scale - 1 - current_scale; ++step)
        p = detail::smooth2d(p, s, true);
    return detail::smooth2d(p, s, false);
}

// ---------------------------------------------------------- layer driver ---

struct ScatterPlanes {
    Plane s0;
    struct S1Entry {
        int j, r;
        Plane p;
    };
    struct S2Entry {
        int j1, r1, j2, r2;
        Plane p;
    };
    std::vector<S1Entry> s1;  // ordered j asc, r asc
    std::vector<S2Entry> s2;  // ordered j1, r1, j2, r2 asc
};

// Full scattering cascade for one image plane at one resolution.
// S0 = smoothed image; S1 = smoothed (log) envelopes; S2 = smoothed second
// layer envelopes for scale paths j2 > j1.
inline ScatterPlanes scatter_layers(const Plane& image, const Resolution& res,
                                    const ScatterConfig& cfg, const dtcwt::FilterSet& f) {
    if (image.rows != res.side || image.cols != res.side)
        throw dimension_error("scatter_layers: image does not match the configured resolution");
    const int J = res.levels;
    ScatterPlanes out;
    out.s0 = smooth_to_invariance(image, 0, J, f);

    auto pyr = dtcwt::forward(image, J, f);
    // U1, log transformed except at the coarsest scale
    std::vector<std::vector<Plane>> u1(size_t(J), std::vector<Plane>(6));
    for (int j = 1; j <= J; ++j) {
        for (int r = 0; r < 6; ++r) {
            const auto& z = pyr.bands[j - 1][r];
            Plane u(z.rows, z.cols);
            for (size_t i = 0; i < z.v.size(); ++i) u.v[i] = std::abs(z.v[i]);
            if (cfg.log_enabled && j < J) u = log_transform(u, cfg.log_k[j - 1]);
            u1[j - 1][r] = std::move(u);
        }
    }
    for (int j = 1; j <= J; ++j)
        for (int r = 0; r < 6; ++r)
            out.s1.push_back({j, r, smooth_to_invariance(u1[j - 1][r], j, J, f)});

    // second layer: one deeper transform per (j1, r1) covers all j2 > j1
    std::vector<ScatterPlanes::S2Entry> s2;
    for (int j1 = 1; j1 < J; ++j1) {
        for (int r1 = 0; r1 < 6; ++r1) {
            auto t = dtcwt::forward(u1[j1 - 1][r1], J - j1, f);
            for (int j2 = j1 + 1; j2 <= J; ++j2) {
                for (int r2 = 0; r2 < 6; ++r2) {
                    const auto& z = t.bands[j2 - j1 - 1][r2];
                    Plane u(z.rows, z.cols);
                    for (size_t i = 0; i < z.v.size(); ++i) u.v[i] = std::abs(z.v[i]);
                    s2.push_back({j1, r1, j2, r2, smooth_to_invariance(u, j2, J, f)});
                }
            }
        }
    }
    std::sort(s2.begin(), s2.end(), [](const auto& a, const auto& b) {
        return std::tie(a.j1, a.r1, a.j2, a.r2) < std::tie(b.j1, b.r1, b.j2, b.r2);
    });
    out.s2 = std::move(s2);
    return out;
}

// ------------------------------------------------------------- upsample ---

namespace detail {

inline double catmull_rom(double p0, double p1, double p2, double p3, double t) {
    return 0.5 * ((2 * p1) + (-p0 + p2) * t + (2 * p0 - 5 * p1 + 4 * p2 - p3) * t * t +
                  (-p0 + 3 * p1 - 3 * p2 + p3) * t * t * t);
}

// sample with linear extrapolation outside [0, n); preserves affine images
inline double tap(const Plane& x, int r, int c) {
    auto sample_row = [&](int row) -> double {
        if (c < 0) return (1.0 - c) * x.at(row, 0) + double(c) * x.at(row, 1);
        if (c >= x.cols) {
            double t = c - (x.cols - 2);
            return (1.0 - t) * x.at(row, x.cols - 2) + t * x.at(row, x.cols - 1);
        }
        return x.at(row, c);
    };
    if (r >= 0 && r < x.rows) return sample_row(r);
    if (r < 0) return (1.0 - r) * sample_row(0) + double(r) * sample_row(1);
    double t = r - (x.rows - 2);
    return (1.0 - t) * sample_row(x.rows - 2) + t * sample_row(x.rows - 1);
}

}  // namespace detail

// Bicubic (Catmull-Rom) upscale to target_side x target_side, pixel-center
// coordinate mapping, output clamped to [0,1].
inline Plane upsample(const Plane& src, int target_side) {
    if (target_side < src.rows || target_side < src.cols)
        throw dimension_error("upsample: target smaller than source");
    if (src.rows == target_side && src.cols == target_side) {
        Plane out = src;
        for (auto& v : out.v) v = std::clamp(v, 0.0, 1.0);
        return out;
    }
    Plane out(target_side, target_side);
    const double sr = double(src.rows) / target_side;
    const double sc = double(src.cols) / target_side;
    for (int r = 0; r < target_side; ++r) {
        double fr = (r + 0.5) * sr - 0.5;
        int r1 = int(std::floor(fr));
        double tr = fr - r1;
        for (int c = 0; c < target_side; ++c) {
            double fc = (c + 0.5) * sc - 0.5;
            int c1 = int(std::floor(fc));
            double tc = fc - c1;
            double col[4];
            for (int i = 0; i < 4; ++i) {
                double p0 = detail::tap(src, r1 - 1 + i, c1 - 1);
                double p1 = detail::tap(src, r1 - 1 + i, c1);
                double p2 = detail::tap(src, r1 - 1 + i, c1 + 1);
                double p3 = detail::tap(src, r1 - 1 + i, c1 + 2);
                col[i] = detail::catmull_rom(p0, p1, p2, p3, tc);
            }
            out.at(r, c) = std::clamp(detail::catmull_rom(col[0], col[1], col[2], col[3], tr),
                                      0.0, 1.0);
        }
    }
    return out;
}

inline RgbImage upsample(const RgbImage& src, int target_side) {
    RgbImage out(target_side, target_side);
    for (int ch = 0; ch < 3; ++ch) {
        Plane p = upsample(src.channel(ch), target_side);
        for (int r = 0; r < target_side; ++r)
            for (int c = 0; c < target_side; ++c) out.at(ch, r, c) = float(p.at(r, c));
    }
    return out;
}

// ------------------------------------------------------- feature vectors ---

struct IndexMap {
    std::vector<FeatureDescriptor> entries;
};

// Deterministic descriptor enumeration: resolution, layer m, scale path
// (lexicographic), orientation path, spatial cell (row-major), channel.
inline IndexMap build_index_map(const ScatterConfig& cfg) {
    IndexMap map;
    for (size_t ri = 0; ri < cfg.resolutions.size(); ++ri) {
        const auto& res = cfg.resolutions[ri];
        const int J = res.levels;
        const int cells = res.side >> (J - 1);
        auto emit = [&](uint8_t layer, int j1, int j2, int r1, int r2) {
            for (int cr = 0; cr < cells; ++cr)
                for (int cc = 0; cc < cells; ++cc)
                    for (int ch = 0; ch < 3; ++ch)
                        map.entries.push_back({uint8_t(ri), layer, int8_t(j1), int8_t(j2),
                                               int8_t(r1), int8_t(r2), uint8_t(cr), uint8_t(cc),
                                               uint8_t(ch)});
        };
        emit(0, -1, -1, -1, -1);
        for (int j = 1; j <= J; ++j)
            for (int r = 0; r < 6; ++r) emit(1, j, -1, r, -1);
        for (int j1 = 1; j1 < J; ++j1)
            for (int j2 = j1 + 1; j2 <= J; ++j2)
                for (int r1 = 0; r1 < 6; ++r1)
                    for (int r2 = 0; r2 < 6; ++r2) emit(2, j1, j2, r1, r2);
    }
    return map;
}

inline size_t feature_length(const ScatterConfig& cfg) {
    size_t n = 0;
    for (const auto& res : cfg.resolutions) {
        const int J = res.levels;
        const size_t cells = size_t(res.side >> (J - 1)) * size_t(res.side >> (J - 1));
        n += cells * (1 + 6 * J + 36 * (size_t(J) * (J - 1) / 2)) * 3;
    }
    return n;
}

struct ScatterFeatureVector {
    std::vector<float> values;
    std::shared_ptr<const IndexMap> index_map;
};

// Multi-resolution, per-channel scattering of a 3-channel raster into one
// flat feature vector following build_index_map order.
inline ScatterFeatureVector extract_features(const RgbImage& rgb, const ScatterConfig& cfg,
                                             const dtcwt::FilterSet& f,
                                             std::shared_ptr<const IndexMap> map = nullptr) {
    cfg.validate();
    if (rgb.rows != rgb.cols) throw dimension_error("extract_features: image must be square");
    ScatterFeatureVector out;
    out.index_map = map ? std::move(map) : std::make_shared<IndexMap>(build_index_map(cfg));
    out.values.reserve(feature_length(cfg));

    for (size_t ri = 0; ri < cfg.resolutions.size(); ++ri) {
        const auto& res = cfg.resolutions[ri];
        RgbImage up = upsample(rgb, res.side);
        std::array<ScatterPlanes, 3> sp;
        for (int ch = 0; ch < 3; ++ch) sp[ch] = scatter_layers(up.channel(ch), res, cfg, f);

        const int J = res.levels;
        const int cells = res.side >> (J - 1);
        auto emit_planes = [&](const Plane* p0, const Plane* p1, const Plane* p2) {
            const Plane* ps[3] = {p0, p1, p2};
            for (int cr = 0; cr < cells; ++cr)
                for (int cc = 0; cc < cells; ++cc)
                    for (int ch = 0; ch < 3; ++ch)
                        out.values.push_back(float(ps[ch]->at(cr, cc)));
        };
        emit_planes(&sp[0].s0, &sp[1].s0, &sp[2].s0);
        for (size_t i = 0; i < sp[0].s1.size(); ++i)
            emit_planes(&sp[0].s1[i].p, &sp[1].s1[i].p, &sp[2].s1[i].p);
        // s1 order is (j, r) ascending which matches the index map; s2 needs
        // (j1, j2, r1, r2) while planes are stored (j1, r1, j2, r2)
        for (int j1 = 1; j1 < J; ++j1)
            for (int j2 = j1 + 1; j2 <= J; ++j2)
                for (int r1 = 0; r1 < 6; ++r1)
                    for (int r2 = 0; r2 < 6; ++r2) {
                        // index within the stored (j1, r1, j2, r2) ordering
                        size_t base = 0;
                        for (int jj = 1; jj < j1; ++jj) base += size_t(6) * (J - jj) * 6;
                        base += size_t(r1) * (J - j1) * 6;
                        base += size_t(j2 - j1 - 1) * 6 + r2;
                        emit_planes(&sp[0].s2[base].p, &sp[1].s2[base].p, &sp[2].s2[base].p);
                    }
    }
    if (out.values.size() != feature_length(cfg))
        throw numeric_error("extract_features: internal length mismatch");
    return out;
}

// ---------------------------------------------------------- normalization ---

struct NormStats {
    std::vector<double> mean;
    std::vector<double> std;
};

// Per-dimension z-score statistics from a row-major matrix of training rows.
inline NormStats fit_normalization(const float* data, size_t rows, size_t cols) {
    if (rows < 2) throw data_error("normalize_features: need at least 2 rows");
    NormStats st;
    st.mean.assign(cols, 0.0);
    st.std.assign(cols, 0.0);
    for (size_t r = 0; r < rows; ++r) {
        const float* row = data + r * cols;
        for (size_t c = 0; c < cols; ++c) st.mean[c] += row[c];
    }
    for (size_t c = 0; c < cols; ++c) st.mean[c] /= double(rows);
    for (size_t r = 0; r < rows; ++r) {
        const float* row = data + r * cols;
        for (size_t c = 0; c < cols; ++c) {
            double d = row[c] - st.mean[c];
            st.std[c] += d * d;
        }
    }
    for (size_t c = 0; c < cols; ++c) st.std[c] = std::sqrt(st.std[c] / double(rows));
    return st;
}

inline void apply_normalization(float* data, size_t rows, size_t cols, const NormStats& st) {
    constexpr double kFloor = 1e-12;
    for (size_t r = 0; r < rows; ++r) {
        float* row = data + r * cols;
        for (size_t c = 0; c < cols; ++c)
            row[c] = float((row[c] - st.mean[c]) / std::max(st.std[c], kFloor));
    }
}

}  // namespace dtscat::scatter
