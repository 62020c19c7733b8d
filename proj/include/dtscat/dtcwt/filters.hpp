#pragma once

#include <array>
#include <vector>

namespace dtscat::dtcwt {

// Level-1 biorthogonal pair (odd length, linear phase, zero-phase anchored at
// the center tap). The 13-tap analysis lowpass and 19-tap synthesis lowpass
// form an exact halfband product with two vanishing moments on each side;
// both have DC gain sqrt(2).
inline constexpr std::array<double, 13> kLevel1AnalysisLow = {
    -0.032320813885565652,  0.00026700321321025303, 0.038446199746507349,
    0.025058642265896547,   0.11241343594504818,    0.32822774511416697,
    0.47002913757456777,    0.32822774511416697,    0.11241343594504818,
    0.025058642265896547,   0.038446199746507349,   0.00026700321321025303,
    -0.032320813885565652};

inline constexpr std::array<double, 19> kLevel1SynthesisLow = {
    0.015985407753795311,  0.00013205593305450707, -0.10088289624919765,
    0.011717328871764894,  0.28697900630079132,    0.10088922542993257,
    -0.53227207401844578,  -0.48137595541655526,   0.68374394680633055,
    1.4443814715501542,    0.68374394680633055,    -0.48137595541655526,
    -0.53227207401844578,  0.10088922542993257,    0.28697900630079132,
    0.011717328871764894,  -0.10088289624919765,   0.00013205593305450707,
    0.015985407753795311};

// 14-tap orthonormal q-shift lowpass, group delay 6.25 samples over the
// passband (the reversed filter has delay 6.75, so the two trees differ by
// exactly half a sample). Double-shift orthonormality, the sqrt(2) DC gain
// and the Nyquist zero all hold to machine precision.
inline constexpr std::array<double, 14> kQshiftLowDelay625 = {
    -0.0095861510620417738, -0.0045683748359257002, 0.069235307842164417,
    -0.067205026792245715,  -0.13225881946368706,   0.31666911570994555,
    0.73166090802333561,    0.56794058778028422,    0.020625436285511892,
    -0.11667476204461183,   0.0259416743066763,     0.014068511645181277,
    0.0014884252545881327,  -0.0031232702760802715};

// A filter together with its zero-phase anchor (index of the tap applied to
// the current sample).
struct Kernel {
    std::vector<double> taps;
    int anchor = 0;
};

// Complete filter bank for the dual-tree transform.
//
// Level 1 runs both trees off one undecimated biorthogonal filtering; the
// trees are the two sampling parities. Levels >= 2 use the q-shift pair:
// tree a (even parity) takes the delay-6.75 filter and tree b (odd parity)
// the delay-6.25 filter, which makes the cumulative tree delays telescope to
// half the sampling period at every scale.
struct FilterSet {
    // level 1, zero-phase kernels
    Kernel level1_lowpass_analysis;    // 13 taps
    Kernel level1_highpass_analysis;   // 19 taps
    Kernel level1_lowpass_synthesis;   // 19 taps
    Kernel level1_highpass_synthesis;  // 13 taps

    // levels >= 2, plain arrays applied in the interleaved scheme
    std::vector<double> qshift_lowpass_a;    // tree a analysis
    std::vector<double> qshift_lowpass_b;    // tree b analysis
    std::vector<double> qshift_highpass_a;   // tree a analysis
    std::vector<double> qshift_highpass_b;   // tree b analysis
    std::vector<double> qshift_lowpass_a_syn;
    std::vector<double> qshift_lowpass_b_syn;
    std::vector<double> qshift_highpass_a_syn;
    std::vector<double> qshift_highpass_b_syn;
};

// Embedded default coefficient tables; satisfies all FilterSet invariants
// (1-D perfect reconstruction, half-sample inter-tree delay, sqrt(2) DC).
inline FilterSet load_default_filters() {
    FilterSet f;
    const auto& h13 = kLevel1AnalysisLow;
    const auto& g19 = kLevel1SynthesisLow;

    f.level1_lowpass_analysis = {std::vector<double>(h13.begin(), h13.end()), 6};
    f.level1_lowpass_synthesis = {std::vector<double>(g19.begin(), g19.end()), 9};
    // H1(z) = G0(-z) and G1(z) = H0(-z) about the center taps
    std::vector<double> h1(19), g1(13);
    for (int k = 0; k < 19; ++k) h1[k] = ((k - 9) % 2 == 0 ? 1.0 : -1.0) * g19[k];
    for (int k = 0; k < 13; ++k) g1[k] = ((k - 6) % 2 == 0 ? 1.0 : -1.0) * h13[k];
    f.level1_highpass_analysis = {std::move(h1), 9};
    f.level1_highpass_synthesis = {std::move(g1), 6};

    const int n = int(kQshiftLowDelay625.size());
    std::vector<double> hq(kQshiftLowDelay625.begin(), kQshiftLowDelay625.end());
    std::vector<double> hr(n);
    for (int k = 0; k < n; ++k) hr[k] = hq[n - 1 - k];

    f.qshift_lowpass_a = hr;  // delay 6.75 on the even (tree a) stream
    f.qshift_lowpass_b = hq;  // delay 6.25 on the odd (tree b) stream
    // within-tree alternating flips; the sign on tree b keeps the interleaved
    // highpass symmetric under boundary reflection
    f.qshift_highpass_a.resize(n);
    f.qshift_highpass_b.resize(n);
    for (int k = 0; k < n; ++k) {
        double s = (k % 2 == 0) ? 1.0 : -1.0;
        f.qshift_highpass_a[k] = s * hq[k];
        f.qshift_highpass_b[k] = -s * hr[k];
    }
    auto rev = [](const std::vector<double>& a) {
        return std::vector<double>(a.rbegin(), a.rend());
    };
    f.qshift_lowpass_a_syn = rev(f.qshift_lowpass_a);
    f.qshift_lowpass_b_syn = rev(f.qshift_lowpass_b);
    f.qshift_highpass_a_syn = rev(f.qshift_highpass_a);
    f.qshift_highpass_b_syn = rev(f.qshift_highpass_b);
    return f;
}

}  // namespace dtscat::dtcwt
