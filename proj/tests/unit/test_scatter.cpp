#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <set>

#include "dtscat/core/rng.hpp"
#include "dtscat/scatter/scattering.hpp"

using namespace dtscat;
using namespace dtscat::scatter;

namespace {

Plane random_plane(int n, int m, SplitMix64& g) {
    Plane p(n, m);
    for (auto& x : p.v) x = g.uniform01();
    return p;
}

RgbImage random_image(int n, SplitMix64& g) {
    RgbImage im(n, n);
    for (auto& x : im.pixels) x = float(g.uniform01());
    return im;
}

double norm_of(const std::vector<float>& v) {
    double s = 0;
    for (float x : v) s += double(x) * x;
    return std::sqrt(s);
}

double dist_of(const std::vector<float>& a, const std::vector<float>& b) {
    double s = 0;
    for (size_t i = 0; i < a.size(); ++i) s += (double(a[i]) - b[i]) * (double(a[i]) - b[i]);
    return std::sqrt(s);
}

}  // namespace

TEST_CASE("modulus: pythagorean value, zeros, global phase invariance") {
    auto f = dtcwt::load_default_filters();
    SplitMix64 g(5);
    auto pyr = dtcwt::forward(random_plane(32, 32, g), 3, f);
    pyr.bands[0][0].at(2, 3) = {3.0, 4.0};
    auto env = modulus(pyr);
    CHECK(env[0].values.at(2, 3) == Catch::Approx(5.0));

    for (auto& b : pyr.bands[2]) std::fill(b.v.begin(), b.v.end(), std::complex<double>{});
    env = modulus(pyr);
    for (const auto& e : env)
        if (e.j == 3)
            for (double v : e.values.v) CHECK(v == 0.0);

    // global phase rotation leaves every envelope untouched
    auto rot = pyr;
    const auto phase = std::polar(1.0, 1.234);
    for (auto& lvl : rot.bands)
        for (auto& b : lvl)
            for (auto& z : b.v) z *= phase;
    auto env2 = modulus(rot);
    for (size_t i = 0; i < env.size(); ++i)
        for (size_t k = 0; k < env[i].values.v.size(); ++k)
            CHECK(env2[i].values.v[k] == Catch::Approx(env[i].values.v[k]).margin(1e-12));
}

TEST_CASE("log_transform: fixed points and skewness reduction") {
    Plane p(1, 2);
    p.at(0, 0) = 0.0;
    p.at(0, 1) = std::exp(1.0) - 1.1;
    Plane q = log_transform(p, 1.1);
    CHECK(q.at(0, 1) == Catch::Approx(1.0));
    Plane z(1, 1, 0.0);
    CHECK(log_transform(z, 1.0).at(0, 0) == 0.0);
    CHECK_THROWS_AS(log_transform(p, 0.0), numeric_error);

    // lognormal-ish samples: tuned k strictly reduces skewness
    SplitMix64 g(17);
    std::vector<double> samples(4000);
    for (auto& s : samples) s = std::exp(1.2 * g.normal());
    auto [k, entry] = tune_log_param(samples, default_k_grid());
    CHECK(std::abs(entry.skew_after) < std::abs(entry.skew_before));
}

TEST_CASE("tune_log_param: recovers the symmetrizing k and handles edge cases") {
    // samples = exp(z) - 1 with z symmetric about 1 -> gap is zero at k = 1
    SplitMix64 g(23);
    std::vector<double> samples;
    for (int i = 0; i < 2000; ++i) {
        double d = 0.9 * g.uniform01();
        samples.push_back(std::exp(1.0 + d) - 1.0);
        samples.push_back(std::exp(1.0 - d) - 1.0);
    }
    auto [k, entry] = tune_log_param(samples, default_k_grid());
    // one geometric grid step around 1
    CHECK(k > 1.0 / 1.25);
    CHECK(k < 1.25);

    // chosen gap is minimal over the grid (re-scan oracle)
    for (double kc : default_k_grid()) {
        std::vector<double> logs(samples.size());
        double mean = 0;
        for (size_t i = 0; i < samples.size(); ++i) {
            logs[i] = std::log(samples[i] + kc);
            mean += logs[i];
        }
        mean /= double(samples.size());
        std::nth_element(logs.begin(), logs.begin() + logs.size() / 2, logs.end());
        double hi = logs[logs.size() / 2];
        double lo = *std::max_element(logs.begin(), logs.begin() + logs.size() / 2);
        double gap = std::abs(mean - 0.5 * (hi + lo));
        CHECK(entry.mean_median_gap <= gap + 1e-12);
    }

    auto [k1, e1] = tune_log_param({0.37}, default_k_grid());
    CHECK(k1 == Catch::Approx(0.1));
    CHECK(e1.mean_median_gap == 0.0);
    CHECK_THROWS_AS(tune_log_param({}, default_k_grid()), data_error);
}

TEST_CASE("smooth_to_invariance: constant, impulse oracle, shift oracle") {
    auto f = dtcwt::load_default_filters();

    Plane c(32, 32, 0.3);
    Plane s = smooth_to_invariance(c, 1, 5, f);  // 4 filter steps, gain 2 each
    CHECK(s.rows == 4);
    for (double v : s.v) CHECK(v == Catch::Approx(0.3 * 16.0).margin(1e-9));

    CHECK_THROWS_AS(smooth_to_invariance(c, 3, 2, f), dimension_error);

    // impulse response equals the independently convolved cascade
    Plane imp(64, 64, 0.0);
    imp.at(31, 33) = 1.0;
    Plane got = smooth_to_invariance(imp, 0, 4, f);
    // oracle: naive full convolution + decimation, separable, same kernel
    std::vector<double> kern(f.qshift_lowpass_a.size());
    for (size_t i = 0; i < kern.size(); ++i)
        kern[i] = 0.5 * (f.qshift_lowpass_a[i] + f.qshift_lowpass_b[i]);
    auto conv_dec_1d = [&](const std::vector<double>& x, bool dec) {
        const int n = int(x.size());
        std::vector<double> y(dec ? n / 2 : n, 0.0);
        for (int i = 0; i < int(y.size()); ++i)
            for (int m = 0; m < int(kern.size()); ++m)
                y[i] += kern[m] * x[dtcwt::ext_hs(n, (dec ? 2 * i : i) + 7 - m)];
        return y;
    };
    // build the separable result row-then-column on the full matrix
    std::vector<std::vector<double>> M(64, std::vector<double>(64, 0.0));
    M[31][33] = 1.0;
    for (int step = 0; step < 4; ++step) {
        bool dec = step < 3;
        std::vector<std::vector<double>> A;
        for (const auto& row : M) A.push_back(conv_dec_1d(row, dec));
        std::vector<std::vector<double>> B(dec ? A.size() / 2 : A.size(),
                                           std::vector<double>(A[0].size()));
        for (size_t cidx = 0; cidx < A[0].size(); ++cidx) {
            std::vector<double> col(A.size());
            for (size_t r = 0; r < A.size(); ++r) col[r] = A[r][cidx];
            auto out = conv_dec_1d(col, dec);
            for (size_t r = 0; r < out.size(); ++r) B[r][cidx] = out[r];
        }
        M = std::move(B);
    }
    REQUIRE(got.rows == int(M.size()));
    for (int r = 0; r < got.rows; ++r)
        for (int cidx = 0; cidx < got.cols; ++cidx)
            CHECK(got.at(r, cidx) == Catch::Approx(M[r][cidx]).margin(1e-12));

    // a 2^(J-1)-pixel circular shift moves the output by exactly one cell;
    // a compactly supported patch keeps every reflected term zero, so the
    // agreement is exact rather than within kernel-tail leakage
    SplitMix64 g(31);
    Plane x(256, 256, 0.0);
    for (int r = 120; r < 136; ++r)
        for (int cc = 120; cc < 136; ++cc) x.at(r, cc) = g.uniform01();
    Plane xs(256, 256);
    for (int r = 0; r < 256; ++r)
        for (int cc = 0; cc < 256; ++cc) xs.at(r, cc) = x.at((r + 256 - 8) % 256, cc);
    Plane y0 = smooth_to_invariance(x, 0, 4, f);  // 32x32 cells, spacing 8
    Plane y1 = smooth_to_invariance(xs, 0, 4, f);
    for (int r = 1; r < 32; ++r)
        for (int cc = 0; cc < 32; ++cc)
            CHECK(y1.at(r, cc) == Catch::Approx(y0.at(r - 1, cc)).margin(1e-12));
}

TEST_CASE("scatter_layers: constant image, path counting, resolution check") {
    auto f = dtcwt::load_default_filters();
    ScatterConfig cfg;
    cfg.log_enabled = false;
    Resolution res{64, 5};

    Plane c(64, 64, 0.42);
    auto sp = scatter_layers(c, res, cfg, f);
    for (const auto& e : sp.s1)
        for (double v : e.p.v) CHECK(std::abs(v) < 1e-9);
    for (const auto& e : sp.s2)
        for (double v : e.p.v) CHECK(std::abs(v) < 1e-9);
    double dc = sp.s0.v[0];
    for (double v : sp.s0.v) CHECK(v == Catch::Approx(dc).margin(1e-9));

    // with log on, S1 at non-coarsest scales is the constant log(k) x gain
    ScatterConfig cfg2;
    auto sp2 = scatter_layers(c, res, cfg2, f);
    for (const auto& e : sp2.s2)
        for (double v : e.p.v) CHECK(std::abs(v) < 1e-8);
    for (const auto& e : sp2.s1) {
        double v0 = e.p.v[0];
        for (double v : e.p.v) CHECK(v == Catch::Approx(v0).margin(1e-8));
    }

    // j2 > j1 rule: 10 scale paths x 36 orientation pairs at J = 5
    CHECK(sp.s2.size() == 360);
    std::set<std::pair<int, int>> paths;
    for (const auto& e : sp.s2) {
        CHECK(e.j2 > e.j1);
        paths.insert({e.j1, e.j2});
    }
    CHECK(paths.size() == 10);
    CHECK(sp.s1.size() == 30);
    CHECK(sp.s0.rows == 4);

    Plane wrong(48, 48, 0.1);
    CHECK_THROWS_AS(scatter_layers(wrong, res, cfg, f), dimension_error);
}

TEST_CASE("upsample: shapes, constants, exact ramp reproduction") {
    Plane c(32, 32, 0.37);
    Plane u = scatter::upsample(c, 64);
    CHECK(u.rows == 64);
    for (double v : u.v) CHECK(v == Catch::Approx(0.37).margin(1e-12));

    // bicubic reproduces affine images exactly (evaluated at mapped coords)
    Plane ramp(32, 32);
    for (int r = 0; r < 32; ++r)
        for (int cc = 0; cc < 32; ++cc) ramp.at(r, cc) = 0.01 * r + 0.013 * cc + 0.05;
    for (int target : {48, 64}) {
        Plane up = scatter::upsample(ramp, target);
        const double s = 32.0 / target;
        for (int r = 0; r < target; ++r)
            for (int cc = 0; cc < target; ++cc) {
                double fr = (r + 0.5) * s - 0.5, fc = (cc + 0.5) * s - 0.5;
                CHECK(up.at(r, cc) == Catch::Approx(0.01 * fr + 0.013 * fc + 0.05).margin(1e-6));
            }
    }
    CHECK_THROWS_AS(scatter::upsample(c, 16), dimension_error);
}

TEST_CASE("extract_features: determinism, lengths, channel independence") {
    auto f = dtcwt::load_default_filters();
    ScatterConfig cfg;
    SplitMix64 g(41);
    RgbImage im = random_image(32, g);

    auto v1 = extract_features(im, cfg, f);
    auto v2 = extract_features(im, cfg, f);
    CHECK(v1.values == v2.values);

    // closed-form length; equals the published multi-resolution counts
    CHECK(v1.values.size() == feature_length(cfg));
    CHECK(v1.values.size() == size_t(18768 + 26028));
    CHECK(v1.index_map->entries.size() == v1.values.size());

    // grayscale replicated across channels gives identical per-channel slices
    RgbImage gray(32, 32);
    for (int r = 0; r < 32; ++r)
        for (int c = 0; c < 32; ++c) {
            float x = float(g.uniform01());
            for (int ch = 0; ch < 3; ++ch) gray.at(ch, r, c) = x;
        }
    auto vg = extract_features(gray, cfg, f);
    for (size_t i = 0; i < vg.values.size(); i += 3) {
        CHECK(vg.values[i] == vg.values[i + 1]);
        CHECK(vg.values[i] == vg.values[i + 2]);
    }

    RgbImage rect(32, 16);
    CHECK_THROWS_AS(extract_features(rect, cfg, f), dimension_error);
}

TEST_CASE("index map: unique descriptors, coarsest-scale log exemption") {
    auto f = dtcwt::load_default_filters();
    ScatterConfig with_log, no_log;
    no_log.log_enabled = false;
    auto map = build_index_map(with_log);

    std::set<std::array<int, 9>> seen;
    for (const auto& d : map.entries)
        seen.insert({d.resolution, d.layer, d.j1, d.j2, d.r1, d.r2, d.cell_row, d.cell_col,
                     d.channel});
    CHECK(seen.size() == map.entries.size());

    SplitMix64 g(51);
    RgbImage im = random_image(32, g);
    auto vl = extract_features(im, with_log, f);
    auto vn = extract_features(im, no_log, f);
    int coarse_checked = 0, fine_different = 0;
    for (size_t i = 0; i < map.entries.size(); ++i) {
        const auto& d = map.entries[i];
        int J = with_log.resolutions[d.resolution].levels;
        if (d.layer == 1 && d.j1 == J) {
            CHECK(vl.values[i] == vn.values[i]);  // coarsest scale bypasses the log
            ++coarse_checked;
        }
        if (d.layer == 1 && d.j1 < J && vl.values[i] != vn.values[i]) ++fine_different;
    }
    CHECK(coarse_checked > 0);
    CHECK(fine_different > 0);
}

TEST_CASE("scattering invariants: monotone shift stability, modulus nonexpansive") {
    auto f = dtcwt::load_default_filters();
    SplitMix64 g(61);

    // shift-distance ratio non-increasing in J (averaged over images)
    std::vector<double> by_j(6, 0.0);
    const int kImages = 5;
    for (int t = 0; t < kImages; ++t) {
        Plane x = random_plane(64, 64, g);
        Plane xs(64, 64);
        for (int r = 0; r < 64; ++r)
            for (int c = 0; c < 64; ++c) xs.at(r, c) = x.at((r + 62) % 64, c);
        for (int J = 2; J <= 5; ++J) {
            ScatterConfig cfg;
            cfg.resolutions = {{64, J}};
            Resolution res{64, J};
            auto a = scatter_layers(x, res, cfg, f);
            auto b = scatter_layers(xs, res, cfg, f);
            double num = 0, den = 0;
            auto acc = [&](const Plane& p, const Plane& q) {
                for (size_t i = 0; i < p.v.size(); ++i) {
                    num += (p.v[i] - q.v[i]) * (p.v[i] - q.v[i]);
                    den += p.v[i] * p.v[i];
                }
            };
            acc(a.s0, b.s0);
            for (size_t i = 0; i < a.s1.size(); ++i) acc(a.s1[i].p, b.s1[i].p);
            for (size_t i = 0; i < a.s2.size(); ++i) acc(a.s2[i].p, b.s2[i].p);
            by_j[J] += std::sqrt(num / den) / kImages;
        }
    }
    for (int J = 3; J <= 5; ++J) CHECK(by_j[J] <= by_j[J - 1] + 1e-12);

    // | |p| - |q| | <= |p - q|
    for (int t = 0; t < 1000; ++t) {
        std::complex<double> p{g.normal(), g.normal()}, q{g.normal(), g.normal()};
        CHECK(std::abs(std::abs(p) - std::abs(q)) <= std::abs(p - q) + 1e-12);
    }

    // log ordering is preserved and its gain is contrast-normalizing
    for (int t = 0; t < 200; ++t) {
        double a = 5.0 * g.uniform01(), b = a + 1e-6 + 2.0 * g.uniform01();
        double k = 0.1 + 5.0 * g.uniform01();
        CHECK(std::log(a + k) < std::log(b + k));
        double d = 0.7;
        CHECK((std::log(b + d + k) - std::log(a + d + k)) < (std::log(b + k) - std::log(a + k)));
    }
}

TEST_CASE("feature length determinism across many random images") {
    auto f = dtcwt::load_default_filters();
    ScatterConfig cfg;
    cfg.resolutions = {{32, 3}};  // small config keeps this brisk
    auto map0 = build_index_map(cfg);
    SplitMix64 g(71);
    size_t len = 0;
    for (int t = 0; t < 100; ++t) {
        auto v = extract_features(random_image(32, g), cfg, f);
        if (t == 0) len = v.values.size();
        CHECK(v.values.size() == len);
        CHECK(v.index_map->entries.size() == map0.entries.size());
    }
}

TEST_CASE("normalize_features: moments, constant columns, reuse on test data") {
    SplitMix64 g(81);
    const size_t rows = 64, cols = 20;
    std::vector<float> m(rows * cols);
    for (auto& x : m) x = float(2.0 * g.uniform01() - 0.3);
    for (size_t r = 0; r < rows; ++r) m[r * cols + 7] = 3.25f;  // constant column

    auto st = scatter::fit_normalization(m.data(), rows, cols);
    auto normed = m;
    scatter::apply_normalization(normed.data(), rows, cols, st);
    for (size_t c = 0; c < cols; ++c) {
        double mean = 0, var = 0;
        for (size_t r = 0; r < rows; ++r) mean += normed[r * cols + c];
        mean /= rows;
        for (size_t r = 0; r < rows; ++r) {
            double d = normed[r * cols + c] - mean;
            var += d * d;
        }
        var /= rows;
        CHECK(std::abs(mean) < 1e-6);
        if (c == 7) {
            for (size_t r = 0; r < rows; ++r) CHECK(normed[r * cols + 7] == 0.0f);
        } else {
            CHECK(std::sqrt(var) == Catch::Approx(1.0).margin(1e-5));
        }
    }
    CHECK_THROWS_AS(scatter::fit_normalization(m.data(), 1, cols), data_error);

    // applying training statistics to the training set reproduces the moments
    auto again = m;
    scatter::apply_normalization(again.data(), rows, cols, st);
    CHECK(again == normed);
}
