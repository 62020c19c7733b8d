#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "dtscat/core/errors.hpp"
#include "dtscat/core/plane.hpp"
#include "dtscat/dtcwt/filters.hpp"

namespace dtscat::dtcwt {

// Half-sample symmetric (repeat-edge) index mapping: ... 2 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline int ext_hs(int n, int i) {
    const int p = 2 * n;
    i %= p;
    if (i < 0) i += p;
    return i < n ? i : p - 1 - i;
}

namespace detail {

// Zero-phase filtering along axis 0 (row index), symmetric extension.
inline Plane filt_zp_rows(const Plane& x, const Kernel& k) {
    Plane y(x.rows, x.cols);
    const int nt = int(k.taps.size());
    for (int i = 0; i < x.rows; ++i) {
        double* out = y.row(i);
        for (int m = 0; m < nt; ++m) {
            const double w = k.taps[m];
            const double* src = x.row(ext_hs(x.rows, i - m + k.anchor));
            for (int c = 0; c < x.cols; ++c) out[c] += w * src[c];
        }
    }
    return y;
}

// One decimating dual-tree level along axis 0. Input rows divisible by 4.
// Even output rows belong to tree a (filter fa on the even input stream),
// odd output rows to tree b (fb on the odd stream); alignment offset 7 makes
// the interleaved array symmetric under the boundary reflection.
inline Plane qstep_fwd_rows(const Plane& v, const std::vector<double>& fa,
                            const std::vector<double>& fb) {
    const int r = v.rows;
    const int nt = int(fa.size());
    Plane out(r / 2, v.cols);
    for (int q = 0; q < r / 4; ++q) {
        double* oa = out.row(2 * q);
        double* ob = out.row(2 * q + 1);
        for (int m = 0; m < nt; ++m) {
            const int pa = 2 * q + 7 - m;
            const double* sa = v.row(ext_hs(r, 2 * pa));
            const double* sb = v.row(ext_hs(r, 2 * pa + 1));
            const double wa = fa[m], wb = fb[m];
            for (int c = 0; c < v.cols; ++c) {
                oa[c] += wa * sa[c];
                ob[c] += wb * sb[c];
            }
        }
    }
    return out;
}

// Adjoint of qstep_fwd_rows combining the lowpass and highpass channels.
inline Plane qstep_inv_rows(const Plane& wlo, const Plane& whi, const FilterSet& f) {
    const int rh = wlo.rows;
    const int nt = int(f.qshift_lowpass_a.size());
    Plane v(2 * rh, wlo.cols);
    for (int p = 0; p < rh; ++p) {
        double* va = v.row(2 * p);
        double* vb = v.row(2 * p + 1);
        for (int t = 0; t < nt; ++t) {
            const int ka = p - 7 + t;
            if ((ka & 1) == 0) {
                const int k = ext_hs(rh, ka);
                const double wl = f.qshift_lowpass_a[t], wh = f.qshift_highpass_a[t];
                const double* sl = wlo.row(k);
                const double* sh = whi.row(k);
                for (int c = 0; c < wlo.cols; ++c) va[c] += wl * sl[c] + wh * sh[c];
            }
            const int kb = p - 6 + t;
            if ((kb & 1) == 1) {
                const int k = ext_hs(rh, kb);
                const double wl = f.qshift_lowpass_b[t], wh = f.qshift_highpass_b[t];
                const double* sl = wlo.row(k);
                const double* sh = whi.row(k);
                for (int c = 0; c < wlo.cols; ++c) vb[c] += wl * sl[c] + wh * sh[c];
            }
        }
    }
    return v;
}

inline Plane filt_zp_cols(const Plane& x, const Kernel& k) {
    return transpose(filt_zp_rows(transpose(x), k));
}

inline Plane qstep_fwd_cols(const Plane& v, const std::vector<double>& fa,
                            const std::vector<double>& fb) {
    return transpose(qstep_fwd_rows(transpose(v), fa, fb));
}

inline Plane qstep_inv_cols(const Plane& wlo, const Plane& whi, const FilterSet& f) {
    return transpose(qstep_inv_rows(transpose(wlo), transpose(whi), f));
}

// Symmetric (repeat-edge) padding on the bottom/right.
inline Plane pad_edge(const Plane& x, int pr, int pc) {
    if (pr == 0 && pc == 0) return x;
    Plane y(x.rows + pr, x.cols + pc);
    for (int r = 0; r < y.rows; ++r) {
        const double* src = x.row(ext_hs(x.rows, r));
        double* dst = y.row(r);
        for (int c = 0; c < y.cols; ++c) dst[c] = src[ext_hs(x.cols, c)];
    }
    return y;
}

inline Plane crop(const Plane& x, int rows, int cols) {
    if (rows == x.rows && cols == x.cols) return x;
    Plane y(rows, cols);
    for (int r = 0; r < rows; ++r)
        std::copy(x.row(r), x.row(r) + cols, y.row(r));
    return y;
}

}  // namespace detail

// Quad corners of an interleaved dual-tree plane combined into the two
// complex orientation bands: z1 = ((a-d) + i(b+c))/sqrt2, z2 = ((a+d) + i(b-c))/sqrt2.
inline std::pair<CPlane, CPlane> quads_to_complex(const Plane& y) {
    const int r2 = y.rows / 2, c2 = y.cols / 2;
    CPlane z1(r2, c2), z2(r2, c2);
    const double s = 0.7071067811865476;
    for (int r = 0; r < r2; ++r) {
        for (int c = 0; c < c2; ++c) {
            const double a = y.at(2 * r, 2 * c);
            const double b = y.at(2 * r, 2 * c + 1);
            const double cc = y.at(2 * r + 1, 2 * c);
            const double d = y.at(2 * r + 1, 2 * c + 1);
            z1.at(r, c) = {s * (a - d), s * (b + cc)};
            z2.at(r, c) = {s * (a + d), s * (b - cc)};
        }
    }
    return {std::move(z1), std::move(z2)};
}

inline Plane complex_to_quads(const CPlane& z1, const CPlane& z2) {
    Plane y(z1.rows * 2, z1.cols * 2);
    const double s = 0.7071067811865476;
    for (int r = 0; r < z1.rows; ++r) {
        for (int c = 0; c < z1.cols; ++c) {
            const auto u = z1.at(r, c), w = z2.at(r, c);
            y.at(2 * r, 2 * c) = s * (u.real() + w.real());
            y.at(2 * r + 1, 2 * c + 1) = s * (w.real() - u.real());
            y.at(2 * r, 2 * c + 1) = s * (u.imag() + w.imag());
            y.at(2 * r + 1, 2 * c) = s * (u.imag() - w.imag());
        }
    }
    return y;
}

// Oriented subband order: 15, 45, 75, 105, 135, 165 degrees.
// (subband type, which complex member) for each slot, with types LH=0, HL=1, HH=2.
inline constexpr std::array<std::array<int, 2>, 6> kBandSlot = {{
    {0, 1}, {2, 0}, {1, 1}, {1, 0}, {2, 1}, {0, 0}}};

struct Pyramid {
    int levels = 0;
    std::vector<std::array<CPlane, 6>> bands;  // bands[j-1][orientation]
    Plane lowpass;                             // interleaved dual-tree scaling plane
    int orig_rows = 0, orig_cols = 0;
    std::vector<std::array<int, 2>> pads;      // padding applied before each level
};

namespace detail {

inline void place_bands(std::array<CPlane, 6>& slot, const Plane& lh, const Plane& hl,
                        const Plane& hh) {
    const Plane* types[3] = {&lh, &hl, &hh};
    std::array<std::pair<CPlane, CPlane>, 3> zs = {
        quads_to_complex(*types[0]), quads_to_complex(*types[1]), quads_to_complex(*types[2])};
    for (int o = 0; o < 6; ++o) {
        auto [t, which] = kBandSlot[o];
        slot[o] = which == 0 ? std::move(zs[t].first) : std::move(zs[t].second);
    }
}

}  // namespace detail

inline Pyramid forward(const Plane& image, int levels, const FilterSet& f) {
    if (levels < 1) throw dimension_error("forward: levels must be >= 1");
    if (image.rows < (1 << levels) || image.cols < (1 << levels))
        throw dimension_error("forward: image " + std::to_string(image.rows) + "x" +
                              std::to_string(image.cols) + " too small for " +
                              std::to_string(levels) + " levels");
    if (!image.all_finite()) throw numeric_error("forward: non-finite input sample");

    Pyramid p;
    p.levels = levels;
    p.orig_rows = image.rows;
    p.orig_cols = image.cols;
    p.bands.resize(levels);
    p.pads.resize(levels);

    int pr = image.rows % 2, pc = image.cols % 2;
    p.pads[0] = {pr, pc};
    Plane ll = detail::pad_edge(image, pr, pc);
    {
        Plane lo = detail::filt_zp_rows(ll, f.level1_lowpass_analysis);
        Plane hi = detail::filt_zp_rows(ll, f.level1_highpass_analysis);
        Plane lh = detail::filt_zp_cols(lo, f.level1_highpass_analysis);
        Plane hl = detail::filt_zp_cols(hi, f.level1_lowpass_analysis);
        Plane hh = detail::filt_zp_cols(hi, f.level1_highpass_analysis);
        detail::place_bands(p.bands[0], lh, hl, hh);
        ll = detail::filt_zp_cols(lo, f.level1_lowpass_analysis);
    }
    for (int j = 2; j <= levels; ++j) {
        pr = (4 - ll.rows % 4) % 4;
        pc = (4 - ll.cols % 4) % 4;
        p.pads[j - 1] = {pr, pc};
        ll = detail::pad_edge(ll, pr, pc);
        Plane rlo = detail::qstep_fwd_rows(ll, f.qshift_lowpass_a, f.qshift_lowpass_b);
        Plane rhi = detail::qstep_fwd_rows(ll, f.qshift_highpass_a, f.qshift_highpass_b);
        Plane lh = detail::qstep_fwd_cols(rlo, f.qshift_highpass_a, f.qshift_highpass_b);
        Plane hl = detail::qstep_fwd_cols(rhi, f.qshift_lowpass_a, f.qshift_lowpass_b);
        Plane hh = detail::qstep_fwd_cols(rhi, f.qshift_highpass_a, f.qshift_highpass_b);
        detail::place_bands(p.bands[j - 1], lh, hl, hh);
        ll = detail::qstep_fwd_cols(rlo, f.qshift_lowpass_a, f.qshift_lowpass_b);
    }
    p.lowpass = std::move(ll);
    return p;
}

inline Plane inverse(const Pyramid& p, const FilterSet& f) {
    if (p.levels < 1 || int(p.bands.size()) != p.levels)
        throw dimension_error("inverse: malformed pyramid");
    Plane ll = p.lowpass;
    for (int j = p.levels; j >= 2; --j) {
        const auto& slot = p.bands[j - 1];
        for (int o = 0; o < 6; ++o)
            if (slot[o].rows * 2 != ll.rows || slot[o].cols * 2 != ll.cols)
                throw dimension_error("inverse: subband shape mismatch at level " +
                                      std::to_string(j));
        Plane lh, hl, hh;
        {
            const CPlane* zs[3][2] = {};
            for (int o = 0; o < 6; ++o) {
                auto [t, which] = kBandSlot[o];
                zs[t][which] = &slot[o];
            }
            lh = complex_to_quads(*zs[0][0], *zs[0][1]);
            hl = complex_to_quads(*zs[1][0], *zs[1][1]);
            hh = complex_to_quads(*zs[2][0], *zs[2][1]);
        }
        Plane rlo = detail::qstep_inv_cols(ll, lh, f);
        Plane rhi = detail::qstep_inv_cols(hl, hh, f);
        ll = detail::qstep_inv_rows(rlo, rhi, f);
        // undo the padding applied before this level
        int tr = ll.rows - p.pads[j - 1][0], tc = ll.cols - p.pads[j - 1][1];
        ll = detail::crop(ll, tr, tc);
    }
    const auto& slot = p.bands[0];
    for (int o = 0; o < 6; ++o)
        if (slot[o].rows * 2 != ll.rows || slot[o].cols * 2 != ll.cols)
            throw dimension_error("inverse: level-1 subband shape mismatch");
    Plane lh, hl, hh;
    {
        const CPlane* zs[3][2] = {};
        for (int o = 0; o < 6; ++o) {
            auto [t, which] = kBandSlot[o];
            zs[t][which] = &slot[o];
        }
        lh = complex_to_quads(*zs[0][0], *zs[0][1]);
        hl = complex_to_quads(*zs[1][0], *zs[1][1]);
        hh = complex_to_quads(*zs[2][0], *zs[2][1]);
    }
    Plane lo(ll.rows, ll.cols), hi(ll.rows, ll.cols);
    {
        Plane a = detail::filt_zp_cols(ll, f.level1_lowpass_synthesis);
        Plane b = detail::filt_zp_cols(lh, f.level1_highpass_synthesis);
        for (size_t i = 0; i < lo.v.size(); ++i) lo.v[i] = 0.5 * (a.v[i] + b.v[i]);
        Plane c = detail::filt_zp_cols(hl, f.level1_lowpass_synthesis);
        Plane d = detail::filt_zp_cols(hh, f.level1_highpass_synthesis);
        for (size_t i = 0; i < hi.v.size(); ++i) hi.v[i] = 0.5 * (c.v[i] + d.v[i]);
    }
    Plane a = detail::filt_zp_rows(lo, f.level1_lowpass_synthesis);
    Plane b = detail::filt_zp_rows(hi, f.level1_highpass_synthesis);
    Plane x(a.rows, a.cols);
    for (size_t i = 0; i < x.v.size(); ++i) x.v[i] = 0.5 * (a.v[i] + b.v[i]);
    return detail::crop(x, p.orig_rows, p.orig_cols);
}

// ------------------------------------------------------------------ 1-D ---

struct Decomposition1d {
    std::vector<std::vector<std::complex<double>>> details;  // per level
    std::vector<double> lowpass;                              // interleaved trees
    int orig_len = 0;
    std::vector<int> pads;
};

inline Decomposition1d decompose_1d(const std::vector<double>& x, int levels,
                                    const FilterSet& f) {
    if (levels < 1) throw dimension_error("decompose_1d: levels must be >= 1");
    if (int(x.size()) < (1 << levels))
        throw dimension_error("decompose_1d: signal length " + std::to_string(x.size()) +
                              " < 2^levels");
    Plane col(int(x.size()), 1);
    std::copy(x.begin(), x.end(), col.v.begin());

    Decomposition1d d;
    d.orig_len = int(x.size());
    d.pads.resize(levels);
    const double s = 0.7071067811865476;

    d.pads[0] = col.rows % 2;
    col = detail::pad_edge(col, d.pads[0], 0);
    Plane y1 = detail::filt_zp_rows(col, f.level1_highpass_analysis);
    {
        std::vector<std::complex<double>> dd(y1.rows / 2);
        for (int q = 0; q < y1.rows / 2; ++q)
            dd[q] = {s * y1.at(2 * q, 0), s * y1.at(2 * q + 1, 0)};
        d.details.push_back(std::move(dd));
    }
    col = detail::filt_zp_rows(col, f.level1_lowpass_analysis);
    for (int j = 2; j <= levels; ++j) {
        d.pads[j - 1] = (4 - col.rows % 4) % 4;
        col = detail::pad_edge(col, d.pads[j - 1], 0);
        Plane hi = detail::qstep_fwd_rows(col, f.qshift_highpass_a, f.qshift_highpass_b);
        std::vector<std::complex<double>> dd(hi.rows / 2);
        for (int q = 0; q < hi.rows / 2; ++q)
            dd[q] = {s * hi.at(2 * q, 0), s * hi.at(2 * q + 1, 0)};
        d.details.push_back(std::move(dd));
        col = detail::qstep_fwd_rows(col, f.qshift_lowpass_a, f.qshift_lowpass_b);
    }
    d.lowpass.assign(col.v.begin(), col.v.end());
    return d;
}

inline std::vector<double> reconstruct_1d(const Decomposition1d& d, const FilterSet& f) {
    const double s2 = 1.4142135623730951;
    Plane col(int(d.lowpass.size()), 1);
    std::copy(d.lowpass.begin(), d.lowpass.end(), col.v.begin());
    const int levels = int(d.details.size());
    for (int j = levels; j >= 2; --j) {
        const auto& dd = d.details[j - 1];
        Plane hi(int(dd.size()) * 2, 1);
        for (size_t q = 0; q < dd.size(); ++q) {
            hi.at(int(2 * q), 0) = s2 * dd[q].real();
            hi.at(int(2 * q + 1), 0) = s2 * dd[q].imag();
        }
        col = detail::qstep_inv_rows(col, hi, f);
        col = detail::crop(col, col.rows - d.pads[j - 1], 1);
    }
    const auto& dd = d.details[0];
    Plane y1(int(dd.size()) * 2, 1);
    for (size_t q = 0; q < dd.size(); ++q) {
        y1.at(int(2 * q), 0) = s2 * dd[q].real();
        y1.at(int(2 * q + 1), 0) = s2 * dd[q].imag();
    }
    Plane a = detail::filt_zp_rows(col, f.level1_lowpass_synthesis);
    Plane b = detail::filt_zp_rows(y1, f.level1_highpass_synthesis);
    std::vector<double> x(size_t(d.orig_len));
    for (int i = 0; i < d.orig_len; ++i) x[i] = 0.5 * (a.at(i, 0) + b.at(i, 0));
    return x;
}

}  // namespace dtscat::dtcwt
