#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <speclens/elements.hpp>
#include <speclens/fourier.hpp>
#include <speclens/metrics.hpp>
#include <speclens/wavepacket.hpp>

#include "support.hpp"

using namespace speclens;

namespace {

constexpr double kPi = std::numbers::pi;

// Grid with t = 0 exactly on a sample: n = 2^16, dt = 0.0025, origin = -8.
AxisPair<double> ongrid_axes() { return make_axis_pair<double>(1 << 16, 163.84, -8.0); }

}  // namespace

TEST_CASE("heralded exponential matches its defining form") {
    const auto axes = ongrid_axes();
    const auto psi = heralded_exponential<double>({1.0, 0.0}, axes);
    const Eigen::Index i0 = 3200;  // t = 0
    REQUIRE(std::abs(axes.time_at(i0)) < 1e-12);

    CHECK(std::abs(psi.samples[i0]) == doctest::Approx(1.0).epsilon(2e-3));
    const Eigen::Index i2 = i0 + 800;  // t = 2
    // ratio is immune to the discrete renormalization
    CHECK(std::abs(psi.samples[i2] / psi.samples[i0]) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(total_energy(psi) == doctest::Approx(1.0).epsilon(1e-12));
    for (Eigen::Index i = 0; i < i0; ++i) CHECK(psi.samples[i] == std::complex<double>(0.0));
    CHECK(psi.samples[i0].real() > 0.0);  // theta(0) = 1
}

TEST_CASE("heralded spectrum is a Lorentzian of FWHM gamma_p") {
    const auto axes = make_axis_pair<double>(1 << 16, 120.0 / 1.7, -0.1 * 120.0 / 1.7);
    const double gamma_p = 1.7;
    const auto Psi = forward_transform(heralded_exponential<double>({gamma_p, 0.0}, axes));
    const ArrayX<double> density = power_spectrum(Psi);

    const auto width = fwhm(density, axes);
    CHECK(std::abs(width.width - gamma_p) <= axes.frequency_step);

    const auto report = bandwidth_b50(density, axes);
    CHECK(std::abs(report.b50 - gamma_p) <= axes.frequency_step);
    REQUIRE(report.fwhm.has_value());
    CHECK(std::abs(report.b50 - *report.fwhm) <= axes.frequency_step);
}

TEST_CASE("herald time shifts the envelope without reshaping the spectrum") {
    const Eigen::Index n = 1 << 14;
    const auto axes0 = make_axis_pair<double>(n, 80.0, -2.0);
    const auto axes5 = make_axis_pair<double>(n, 80.0, 3.0);
    const auto psi0 = heralded_exponential<double>({1.0, 0.0}, axes0);
    const auto psi5 = heralded_exponential<double>({1.0, 5.0}, axes5);

    CHECK((psi5.samples - psi0.samples).abs().maxCoeff() < 1e-14);

    const ArrayX<double> mag0 = forward_transform(psi0).samples.abs();
    const ArrayX<double> mag5 = forward_transform(psi5).samples.abs();
    CHECK((mag5 - mag0).abs().maxCoeff() < 1e-12 * mag0.maxCoeff());
}

TEST_CASE("heralded exponential rejects bad parameters") {
    const auto axes = make_axis_pair<double>(1024, 80.0, -8.0);
    CHECK_THROWS_AS(heralded_exponential<double>({0.0, 0.0}, axes), std::invalid_argument);
    CHECK_THROWS_AS(heralded_exponential<double>({-1.0, 0.0}, axes), std::invalid_argument);
    CHECK_THROWS_AS(heralded_exponential<double>({1.0, -9.0}, axes), std::invalid_argument);
    CHECK_THROWS_AS(heralded_exponential<double>({1.0, 80.0}, axes), std::invalid_argument);
}

TEST_CASE("total energy is the quadrature sum") {
    const auto axes = make_axis_pair<double>(2048, 60.0, -6.0);
    const auto psi = heralded_exponential<double>({1.0, 0.0}, axes);
    CHECK(total_energy(psi) == doctest::Approx(1.0).epsilon(1e-12));

    TemporalWavepacket<double> doubled{axes, 2.0 * psi.samples};
    CHECK(total_energy(doubled) == doctest::Approx(4.0).epsilon(1e-12));

    const auto Psi = forward_transform(psi);
    CHECK(total_energy(Psi) == doctest::Approx(total_energy(psi)).epsilon(1e-12));
}

TEST_CASE("extract_phase of a real positive envelope is zero") {
    const auto axes = make_axis_pair<double>(4096, 80.0, -8.0);
    const auto psi = heralded_exponential<double>({1.0, 0.0}, axes);
    const auto phase = extract_phase(psi, 1e-12);
    bool any_defined = false;
    for (Eigen::Index i = 0; i < axes.n_samples; ++i) {
        if (!phase.defined[i]) continue;
        any_defined = true;
        CHECK(std::abs(phase.phase[i]) < 1e-12);
    }
    CHECK(any_defined);
    for (Eigen::Index i = 0; i < axes.n_samples; ++i)
        if (axes.time_at(i) < 0.0) CHECK(!phase.defined[i]);
}

TEST_CASE("extract_phase recovers a linear phase ramp") {
    const auto axes = make_axis_pair<double>(4096, 80.0, -8.0);
    auto psi = heralded_exponential<double>({1.0, 0.0}, axes);
    const double w1 = 3.7;
    for (Eigen::Index i = 0; i < axes.n_samples; ++i)
        psi.samples[i] *= std::polar(1.0, w1 * axes.time_at(i));

    const auto phase = extract_phase(psi, 1e-12);
    // slope of the unwrapped phase equals w1 on every defined run
    for (Eigen::Index i = 1; i < axes.n_samples; ++i) {
        if (!phase.defined[i] || !phase.defined[i - 1]) continue;
        const double slope = (phase.phase[i] - phase.phase[i - 1]) / axes.time_step;
        CHECK(slope == doctest::Approx(w1).epsilon(1e-9));
    }
}

TEST_CASE("resonant dispersed packet carries a two-level phase") {
    const Eigen::Index n = 1 << 18;
    const double span = 160.0;
    const double dt = span / static_cast<double>(n);
    const auto axes =
        make_axis_pair<double>(n, span, -(std::round(0.1 * static_cast<double>(n)) + 0.5) * dt);
    const auto Psi = forward_transform(heralded_exponential<double>({1.0, 0.0}, axes));
    const auto psi1 = inverse_transform(reflect_off_cavity(Psi, {0.25, 0.0}));

    // floor high enough to exclude pre-herald ringing and the flip-point
    // neighborhood, where the finite-grid phase is meaningless
    const auto phase = extract_phase(psi1, 1e-4);
    double base = 0.0;
    bool have_base = false;
    Eigen::Index off_level = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!phase.defined[i]) continue;
        if (!have_base) {
            base = phase.phase[i];
            have_base = true;
            continue;
        }
        const double d = std::remainder(phase.phase[i] - base, 2.0 * kPi);
        const bool near_zero = std::abs(d) < 1e-4;
        const bool near_pi = std::abs(std::abs(d) - kPi) < 1e-4;
        if (!near_zero && !near_pi) ++off_level;
    }
    CHECK(have_base);
    CHECK(off_level == 0);
}

TEST_CASE("undefined gaps reset the unwrap accumulator") {
    const auto axes = make_axis_pair<double>(64, 64.0, 0.0);
    TemporalWavepacket<double> psi{axes, ArrayXc<double>::Zero(64)};
    for (Eigen::Index i = 4; i < 12; ++i) psi.samples[i] = std::polar(1.0, 0.3);
    for (Eigen::Index i = 40; i < 48; ++i) psi.samples[i] = std::polar(1.0, 2.0);

    const auto phase = extract_phase(psi, 1e-6);
    for (Eigen::Index i = 4; i < 12; ++i) {
        REQUIRE(phase.defined[i]);
        CHECK(phase.phase[i] == doctest::Approx(0.3).epsilon(1e-12));
    }
    for (Eigen::Index i = 40; i < 48; ++i) {
        REQUIRE(phase.defined[i]);
        // a fresh principal value, not a continuation of the first block
        CHECK(phase.phase[i] == doctest::Approx(2.0).epsilon(1e-12));
    }
    for (Eigen::Index i = 12; i < 40; ++i) CHECK(!phase.defined[i]);
}

TEST_CASE("extract_phase rejects empty content") {
    const auto axes = make_axis_pair<double>(64, 64.0, 0.0);
    TemporalWavepacket<double> psi{axes, ArrayXc<double>::Zero(64)};
    CHECK_THROWS_AS(extract_phase(psi, 1e-12), std::invalid_argument);
    TemporalWavepacket<double> ok{axes, ArrayXc<double>::Ones(64)};
    CHECK_THROWS_AS(extract_phase(ok, -1.0), std::invalid_argument);
}
