#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "speclens/wavepacket.hpp"

namespace speclens {

template <class Scalar>
struct BandwidthReport {
    Scalar b50;                   // smallest window holding 50% of the energy, rad/s
    Scalar window_lo, window_hi;  // window edges, rad/s
    std::optional<Scalar> fwhm;   // absent on multi-peaked ambiguity
    Scalar peak_density;          // per (rad/s)
    Scalar total_energy;
};

template <class Scalar>
ArrayX<Scalar> power_spectrum(const SpectralWavepacket<Scalar>& Psi) {
    return Psi.samples.abs2();
}

template <class Scalar>
struct FwhmResult {
    Scalar width;
    bool ambiguous;  // secondary maxima comparable to the global peak
};

// Width at half of the global maximum over the peak's connected region,
// linear interpolation at the crossings. Secondary strict local maxima at or
// above secondary_peak_fraction of the peak raise the ambiguity flag.
template <class Scalar>
FwhmResult<Scalar> fwhm(const ArrayX<Scalar>& samples, const AxisPair<Scalar>& axes,
                        Scalar secondary_peak_fraction = Scalar(0.02)) {
    const Eigen::Index n = samples.size();
    if (n == 0) throw std::invalid_argument("fwhm: empty input");
    Eigen::Index peak = 0;
    const Scalar peak_value = samples.maxCoeff(&peak);
    if (!(peak_value > samples.minCoeff()))
        throw std::invalid_argument("fwhm: flat input has no half-maximum width");

    const Scalar half = peak_value / Scalar(2);
    Scalar left_x = Scalar(0);
    {
        Eigen::Index i = peak;
        while (i > 0 && samples[i - 1] > half) --i;
        left_x = (i == 0) ? Scalar(0)
                          : Scalar(i - 1) + (half - samples[i - 1]) / (samples[i] - samples[i - 1]);
    }
    Scalar right_x = Scalar(n - 1);
    {
        Eigen::Index i = peak;
        while (i < n - 1 && samples[i + 1] > half) ++i;
        right_x = (i == n - 1)
                      ? Scalar(n - 1)
                      : Scalar(i) + (samples[i] - half) / (samples[i] - samples[i + 1]);
    }

    int maxima = 0;
    const Scalar floor_value = secondary_peak_fraction * peak_value;
    for (Eigen::Index i = 1; i + 1 < n; ++i)
        if (samples[i] > samples[i - 1] && samples[i] > samples[i + 1] &&
            samples[i] >= floor_value)
            ++maxima;

    return {(right_x - left_x) * axes.frequency_step, maxima >= 2};
}

namespace detail {

// Samples are bin densities: bin k covers [k, k+1) in edge-index space, with
// physical edge positions frequencies[0] + (e - 1/2) * dw. The cumulative
// energy C is piecewise linear; every optimal window has an end on a bin edge
// or a start whose induced end lies on one, so sweeping that candidate set
// with a monotone end pointer finds the exact interpolated minimum.
template <class Scalar>
struct CumulativeEnergy {
    const ArrayX<Scalar>& s;
    std::vector<Scalar> cum;  // at edges 0..n

    explicit CumulativeEnergy(const ArrayX<Scalar>& spectrum) : s(spectrum) {
        cum.resize(static_cast<size_t>(s.size()) + 1);
        cum[0] = Scalar(0);
        for (Eigen::Index k = 0; k < s.size(); ++k)
            cum[static_cast<size_t>(k) + 1] = cum[static_cast<size_t>(k)] + s[k];
    }

    Scalar total() const { return cum.back(); }

    Scalar at(Scalar x) const {
        if (x <= Scalar(0)) return Scalar(0);
        if (x >= Scalar(s.size())) return total();
        const auto i = static_cast<Eigen::Index>(x);
        return cum[static_cast<size_t>(i)] + (x - Scalar(i)) * s[i];
    }

    // Smallest x with C(x) >= v, starting the edge search at hint (monotone use).
    Scalar inverse(Scalar v, size_t& hint) const {
        if (v <= Scalar(0)) return Scalar(0);
        while (hint < cum.size() - 1 && cum[hint] < v) ++hint;
        if (cum[hint] < v) return Scalar(s.size());
        if (hint == 0) return Scalar(0);
        const Scalar run = cum[hint] - cum[hint - 1];
        return Scalar(hint - 1) + (v - cum[hint - 1]) / run;
    }
};

}  // namespace detail

template <class Scalar>
BandwidthReport<Scalar> bandwidth_b50(const ArrayX<Scalar>& spectrum,
                                      const AxisPair<Scalar>& axes) {
    const Eigen::Index n = spectrum.size();
    if (n != axes.n_samples)
        throw std::invalid_argument("bandwidth_b50: spectrum length != grid size");
    if ((spectrum < Scalar(0)).any())
        throw std::invalid_argument("bandwidth_b50: negative spectral density");

    const detail::CumulativeEnergy<Scalar> C(spectrum);
    const Scalar total = C.total();
    if (!(total > Scalar(0))) throw std::invalid_argument("bandwidth_b50: all-zero spectrum");
    const Scalar target = total / Scalar(2);

    std::vector<Scalar> starts;
    starts.reserve(2 * static_cast<size_t>(n) + 2);
    size_t gen_hint = 0;  // C.cum[e] - target is nondecreasing in e
    for (size_t e = 0; e < C.cum.size(); ++e) {
        starts.push_back(Scalar(e));
        if (C.cum[e] >= target) starts.push_back(C.inverse(C.cum[e] - target, gen_hint));
    }
    std::sort(starts.begin(), starts.end());

    Scalar best_width = Scalar(n);
    Scalar best_start = Scalar(0);
    size_t hint = 0;
    for (const Scalar a : starts) {
        const Scalar need = C.at(a) + target;
        if (need > total * (Scalar(1) + Scalar(1e-14))) break;  // starts are sorted
        const Scalar b = C.inverse(std::min(need, total), hint);
        if (b - a < best_width) {
            best_width = b - a;
            best_start = a;
        }
    }

    const Scalar edge0 = axes.frequency_at(0) - axes.frequency_step / Scalar(2);
    BandwidthReport<Scalar> report;
    report.b50 = best_width * axes.frequency_step;
    report.window_lo = edge0 + best_start * axes.frequency_step;
    report.window_hi = report.window_lo + report.b50;
    report.peak_density = spectrum.maxCoeff();
    report.total_energy = total * axes.frequency_step;
    if (spectrum.maxCoeff() > spectrum.minCoeff()) {
        const FwhmResult<Scalar> w = fwhm(spectrum, axes);
        report.fwhm = w.ambiguous ? std::optional<Scalar>() : std::optional<Scalar>(w.width);
    }
    return report;
}

// Reference search: evaluates every candidate window by direct per-window
// summation, no shared cumulative sums. Quadratic; for cross-checking only.
template <class Scalar>
Scalar bandwidth_b50_exhaustive(const ArrayX<Scalar>& spectrum, const AxisPair<Scalar>& axes) {
    const Eigen::Index n = spectrum.size();
    if ((spectrum < Scalar(0)).any())
        throw std::invalid_argument("bandwidth_b50_exhaustive: negative spectral density");
    // same accumulation order as the per-window sums below, so windows ending
    // exactly at the last edge compare equal to the total
    Scalar total = Scalar(0);
    for (Eigen::Index k = 0; k < n; ++k) total += spectrum[k];
    if (!(total > Scalar(0)))
        throw std::invalid_argument("bandwidth_b50_exhaustive: all-zero spectrum");
    const Scalar target = total / Scalar(2);

    auto cumulative_to = [&](Scalar x) {
        Scalar acc = Scalar(0);
        for (Eigen::Index k = 0; k < n && Scalar(k) < x; ++k)
            acc += spectrum[k] * std::min(x - Scalar(k), Scalar(1));
        return acc;
    };
    auto end_for = [&](Scalar a) {
        const Scalar need = std::min(cumulative_to(a) + target, total);
        Scalar acc = Scalar(0);
        for (Eigen::Index k = 0; k < n; ++k) {
            if (acc + spectrum[k] >= need && spectrum[k] > Scalar(0)) {
                Scalar x = Scalar(k) + (need - acc) / spectrum[k];
                if (x >= a) return x;
            }
            acc += spectrum[k];
        }
        return Scalar(n);
    };

    std::vector<Scalar> starts;
    for (Eigen::Index e = 0; e <= n; ++e) {
        starts.push_back(Scalar(e));
        const Scalar surplus = cumulative_to(Scalar(e)) - target;
        if (surplus >= Scalar(0)) {
            Scalar acc = Scalar(0);
            for (Eigen::Index k = 0; k < n; ++k) {  // leftmost x with C(x) >= surplus
                if (acc + spectrum[k] >= surplus && spectrum[k] > Scalar(0)) {
                    starts.push_back(Scalar(k) + (surplus - acc) / spectrum[k]);
                    break;
                }
                acc += spectrum[k];
            }
        }
    }
    std::sort(starts.begin(), starts.end());

    Scalar best = Scalar(n);
    for (const Scalar a : starts) {
        if (cumulative_to(a) + target > total * (Scalar(1) + Scalar(1e-14))) continue;
        best = std::min(best, end_for(a) - a);
    }
    return best * axes.frequency_step;
}

template <class Scalar>
struct CompressionReport {
    Scalar b50_ratio;           // before / after
    Scalar peak_density_ratio;  // after / before
};

template <class Scalar>
CompressionReport<Scalar> compression_report(const SpectralWavepacket<Scalar>& before,
                                             const SpectralWavepacket<Scalar>& after) {
    if (!(before.axes == after.axes))
        throw std::invalid_argument("compression_report: grid mismatch");
    const auto rb = bandwidth_b50(power_spectrum(before), before.axes);
    const auto ra = bandwidth_b50(power_spectrum(after), after.axes);
    return {rb.b50 / ra.b50, ra.peak_density / rb.peak_density};
}

}  // namespace speclens
