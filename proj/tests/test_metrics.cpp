#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <speclens/elements.hpp>
#include <speclens/fourier.hpp>
#include <speclens/metrics.hpp>
#include <speclens/wavepacket.hpp>

#include "support.hpp"

using namespace speclens;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

AxisPair<double> default_axes() { return make_axis_pair<double>(1 << 16, 120.0, -12.0); }

SpectralWavepacket<double> input_spectrum(const AxisPair<double>& axes) {
    return forward_transform(heralded_exponential<double>({1.0, 0.0}, axes));
}

SpectralWavepacket<double> compressed_spectrum(double gamma_c, const AxisPair<double>& axes) {
    const auto dispersed = inverse_transform(reflect_off_cavity(input_spectrum(axes), {gamma_c, 0.0}));
    const auto flipped = apply_modulator(
        dispersed, ModulatorSchedule<double>::binary(binary_flip_time(1.0, gamma_c)));
    return forward_transform(flipped);
}

}  // namespace

TEST_CASE("power spectrum of the heralded packet") {
    const auto axes = default_axes();
    const auto Psi = input_spectrum(axes);
    const ArrayX<double> density = power_spectrum(Psi);

    CHECK(density.maxCoeff() == doctest::Approx(4.0 / kTwoPi).epsilon(5e-4));
    CHECK(density.sum() * axes.frequency_step ==
          doctest::Approx(total_energy(Psi)).epsilon(1e-13));
    CHECK(total_energy(Psi) == doctest::Approx(1.0).epsilon(1e-10));

    const Eigen::Index c = axes.n_samples / 2;
    for (Eigen::Index m = 1; m < axes.n_samples / 2; m += 97)
        CHECK(std::abs(density[c + m] - density[c - m]) < 1e-10 * density.maxCoeff());
}

TEST_CASE("half-energy bandwidth of the Lorentzian line") {
    const auto axes = default_axes();
    const auto report = bandwidth_b50(power_spectrum(input_spectrum(axes)), axes);

    CHECK(report.b50 == doctest::Approx(0.999781768).epsilon(1e-6));
    CHECK(std::abs(report.b50 - 1.0) <= axes.frequency_step);
    CHECK(report.window_lo < 0.0);
    CHECK(report.window_hi > 0.0);
    CHECK(report.window_hi - report.window_lo == doctest::Approx(report.b50).epsilon(1e-12));
    CHECK(report.peak_density == doctest::Approx(4.0 / kTwoPi).epsilon(5e-4));
    CHECK(report.total_energy == doctest::Approx(1.0).epsilon(1e-10));
    REQUIRE(report.fwhm.has_value());
    CHECK(std::abs(*report.fwhm - 1.0) <= axes.frequency_step);
}

TEST_CASE("compressed band shrinks to about 0.3 gamma_p") {
    const auto axes = default_axes();
    const auto r25 = bandwidth_b50(power_spectrum(compressed_spectrum(0.25, axes)), axes);
    CHECK(r25.b50 == doctest::Approx(0.316365419).epsilon(1e-6));
    CHECK(r25.b50 > 0.28);
    CHECK(r25.b50 < 0.32);

    const auto r_headline =
        bandwidth_b50(power_spectrum(compressed_spectrum(7.3 / 20.6, axes)), axes);
    CHECK(r_headline.b50 == doctest::Approx(0.321924448).epsilon(1e-6));
}

TEST_CASE("two equal boxes tie and the leftmost window wins") {
    const auto axes = make_axis_pair<double>(512, 64.0, -32.0);
    const double fs = axes.frequency_step;
    ArrayX<double> s = ArrayX<double>::Zero(512);
    s.segment(100, 10).setConstant(1.0);
    s.segment(300, 10).setConstant(1.0);

    const auto report = bandwidth_b50(s, axes);
    CHECK(report.b50 == doctest::Approx(10.0 * fs).epsilon(1e-12));
    const double edge0 = axes.frequency_at(0) - fs / 2.0;
    CHECK(report.window_lo == doctest::Approx(edge0 + 100.0 * fs).epsilon(1e-12));
}

TEST_CASE("degenerate spectra") {
    const auto axes = make_axis_pair<double>(64, 16.0, -8.0);
    const double fs = axes.frequency_step;

    ArrayX<double> flat = ArrayX<double>::Ones(64);
    const auto uniform = bandwidth_b50(flat, axes);
    CHECK(uniform.b50 == doctest::Approx(32.0 * fs).epsilon(1e-12));
    CHECK(uniform.window_lo ==
          doctest::Approx(axes.frequency_at(0) - fs / 2.0).epsilon(1e-12));
    CHECK(!uniform.fwhm.has_value());

    ArrayX<double> spike = ArrayX<double>::Zero(64);
    spike[17] = 5.0;
    const auto single = bandwidth_b50(spike, axes);
    CHECK(single.b50 == doctest::Approx(0.5 * fs).epsilon(1e-12));
    CHECK(single.window_lo ==
          doctest::Approx(axes.frequency_at(0) + (17.0 - 0.5) * fs).epsilon(1e-12));
}

TEST_CASE("bandwidth is invariant under intensity rescaling") {
    const auto axes = make_axis_pair<double>(512, 64.0, -32.0);
    ArrayX<double> s(512);
    testutil::Rng rng(404);
    for (Eigen::Index i = 0; i < 512; ++i) s[i] = rng.uniform();
    for (Eigen::Index i = 120; i < 200; ++i) s[i] = 0.0;

    const auto a = bandwidth_b50(s, axes);
    const ArrayX<double> scaled = 3.7 * s;
    const auto b = bandwidth_b50(scaled, axes);
    CHECK(b.b50 == doctest::Approx(a.b50).epsilon(1e-12));
    CHECK(b.window_lo == doctest::Approx(a.window_lo).epsilon(1e-12));
    CHECK(b.peak_density == doctest::Approx(3.7 * a.peak_density).epsilon(1e-12));
}

TEST_CASE("fast window search agrees with the exhaustive reference") {
    const auto axes = make_axis_pair<double>(64, 16.0, -8.0);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        testutil::Rng rng(seed);
        ArrayX<double> s(64);
        for (Eigen::Index i = 0; i < 64; ++i)
            s[i] = rng.uniform() < 0.3 ? 0.0 : rng.uniform();
        if (!(s.sum() > 0.0)) s[5] = 1.0;

        const double fast = bandwidth_b50(s, axes).b50;
        const double slow = bandwidth_b50_exhaustive(s, axes);
        CHECK(std::abs(fast - slow) <= 1e-9 * std::max(fast, slow));
    }
}

TEST_CASE("bandwidth input validation") {
    const auto axes = make_axis_pair<double>(64, 16.0, -8.0);
    const ArrayX<double> zeros = ArrayX<double>::Zero(64);
    const ArrayX<double> short_ones = ArrayX<double>::Ones(32);
    CHECK_THROWS_AS(bandwidth_b50(zeros, axes), std::invalid_argument);
    ArrayX<double> neg = ArrayX<double>::Ones(64);
    neg[3] = -0.5;
    CHECK_THROWS_AS(bandwidth_b50(neg, axes), std::invalid_argument);
    CHECK_THROWS_AS(bandwidth_b50(short_ones, axes), std::invalid_argument);
    CHECK_THROWS_AS(bandwidth_b50_exhaustive(zeros, axes), std::invalid_argument);
}

TEST_CASE("full width at half maximum") {
    const auto axes = default_axes();
    const auto lorentzian = fwhm(power_spectrum(input_spectrum(axes)), axes);
    CHECK(std::abs(lorentzian.width - 1.0) <= axes.frequency_step);
    CHECK(!lorentzian.ambiguous);

    const auto gauss_axes = make_axis_pair<double>(4096, 40.0, -20.0);
    const double sigma = 2.0;
    ArrayX<double> gauss(4096);
    for (Eigen::Index k = 0; k < 4096; ++k) {
        const double w = gauss_axes.frequency_at(k);
        gauss[k] = std::exp(-w * w / (2.0 * sigma * sigma));
    }
    const auto g = fwhm(gauss, gauss_axes);
    CHECK(g.width ==
          doctest::Approx(2.0 * std::sqrt(2.0 * std::log(2.0)) * sigma).epsilon(1e-3));
    CHECK(!g.ambiguous);

    const ArrayX<double> flat = ArrayX<double>::Ones(64);
    const ArrayX<double> empty;
    CHECK_THROWS_AS(fwhm(flat, axes), std::invalid_argument);
    CHECK_THROWS_AS(fwhm(empty, axes), std::invalid_argument);
}

TEST_CASE("compressed spectrum sidelobes make the half width ambiguous") {
    const auto axes = default_axes();
    const ArrayX<double> density = power_spectrum(compressed_spectrum(0.25, axes));

    CHECK(fwhm(density, axes).ambiguous);
    CHECK(!fwhm(density, axes, 0.10).ambiguous);  // sidelobes sit near 4% of the peak
    CHECK(!bandwidth_b50(density, axes).fwhm.has_value());
}

TEST_CASE("compression report") {
    const auto axes = default_axes();
    const auto before = input_spectrum(axes);

    const auto same = compression_report(before, before);
    CHECK(same.b50_ratio == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(same.peak_density_ratio == doctest::Approx(1.0).epsilon(1e-15));

    const auto after = compressed_spectrum(0.25, axes);
    const auto report = compression_report(before, after);
    CHECK(report.b50_ratio == doctest::Approx(3.160211916).epsilon(1e-6));
    CHECK(report.peak_density_ratio == doctest::Approx(3.791662008).epsilon(1e-6));
    CHECK(report.b50_ratio > 2.8);
    CHECK(report.b50_ratio < 4.2);

    const auto other_axes = make_axis_pair<double>(1 << 16, 130.0, -13.0);
    const SpectralWavepacket<double> mismatched{other_axes,
                                                ArrayXc<double>::Ones(other_axes.n_samples)};
    CHECK_THROWS_AS(compression_report(before, mismatched), std::invalid_argument);
}
