#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "speclens/elements.hpp"
#include "speclens/fourier.hpp"
#include "speclens/metrics.hpp"
#include "speclens/simplex.hpp"
#include "speclens/wavepacket.hpp"

namespace speclens {

enum class FlipTimeMode { analytic, free_search };

// Ranges and grid resolutions are dimensionless: gamma_c and detuning in
// units of gamma_p, flip time in units of 1/gamma_p. An axis may be a
// singleton (lo == hi, resolution 1); otherwise lo < hi with resolution >= 3.
template <class Scalar>
struct SearchSpace {
    std::array<Scalar, 2> gamma_c_range{Scalar(0.05), Scalar(1)};
    std::array<Scalar, 2> detuning_range{Scalar(-0.5), Scalar(0.5)};
    std::array<Scalar, 2> flip_time_range{Scalar(0.5), Scalar(5)};  // free mode only
    FlipTimeMode flip_time_mode = FlipTimeMode::analytic;
    int gamma_c_resolution = 25;
    int detuning_resolution = 21;
    int flip_time_resolution = 1;
};

template <class Scalar>
struct TraceEntry {
    Scalar gamma_c, detuning, flip_time;  // gamma_p units
    Scalar b50;                           // gamma_p units; NaN when failed
    bool ok;
};

template <class Scalar>
struct Optimum {
    Scalar gamma_c_opt, detuning_opt, flip_time_opt, b50_opt;  // gamma_p units
    long evaluation_count = 0;
    std::vector<TraceEntry<Scalar>> trace;
};

struct optimization_failed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// End-to-end compressed bandwidth: heralded packet -> cavity reflection ->
// phase modulator -> b50 of the output spectrum. On resonance the modulator
// is a binary flip at flip_time; off resonance it is the conjugate schedule
// e^{-i arg psi'} (flip_time unused there).
template <class Scalar>
Scalar objective(Scalar gamma_c, Scalar detuning, Scalar flip_time, Scalar gamma_p,
                 const AxisPair<Scalar>& axes) {
    const TemporalWavepacket<Scalar> psi =
        heralded_exponential<Scalar>({gamma_p, Scalar(0)}, axes);
    const SpectralWavepacket<Scalar> spectrum = forward_transform(psi);
    const SpectralWavepacket<Scalar> reflected =
        reflect_off_cavity(spectrum, {gamma_c, detuning});
    const TemporalWavepacket<Scalar> dispersed = inverse_transform(reflected);

    TemporalWavepacket<Scalar> compressed;
    if (detuning == Scalar(0)) {
        compressed = apply_modulator(dispersed, ModulatorSchedule<Scalar>::binary(flip_time));
    } else {
        const PhaseSamples<Scalar> phi = extract_phase(dispersed, Scalar(0));
        ArrayX<Scalar> counter = ArrayX<Scalar>::Zero(phi.phase.size());
        for (Eigen::Index i = 0; i < phi.phase.size(); ++i)
            if (phi.defined[i]) counter[i] = -phi.phase[i];
        compressed = apply_modulator(dispersed, ModulatorSchedule<Scalar>::conjugate(counter));
    }
    return bandwidth_b50(power_spectrum(forward_transform(compressed)), axes).b50;
}

namespace detail {

template <class Scalar>
void validate_axis(Scalar lo, Scalar hi, int resolution, const char* name) {
    if (lo == hi && resolution == 1) return;
    if (!(lo < hi))
        throw std::invalid_argument(std::string("minimize: empty range for ") + name);
    if (resolution < 3)
        throw std::invalid_argument(std::string("minimize: resolution < 3 for ") + name);
}

template <class Scalar>
std::vector<Scalar> axis_values(Scalar lo, Scalar hi, int resolution) {
    if (resolution == 1) return {lo};
    std::vector<Scalar> v(static_cast<size_t>(resolution));
    for (int i = 0; i < resolution; ++i)
        v[static_cast<size_t>(i)] =
            lo + (hi - lo) * Scalar(i) / Scalar(resolution - 1);
    return v;
}

template <class Scalar>
Scalar analytic_flip_nd(Scalar gamma_c_nd) {
    // binary_flip_time in gamma_p = 1 units; NaN where undefined
    if (!(gamma_c_nd > Scalar(0)) || !(gamma_c_nd < Scalar(1)))
        return std::numeric_limits<Scalar>::quiet_NaN();
    return binary_flip_time(Scalar(1), gamma_c_nd);
}

}  // namespace detail

// Coarse grid scan followed by simplex refinement over the non-singleton
// axes, all in gamma_p units. Failed evaluations (e.g. no analytic flip for
// gamma_c >= gamma_p on resonance) are recorded in the trace and skipped.
template <class Scalar>
Optimum<Scalar> minimize(const SearchSpace<Scalar>& space, Scalar gamma_p,
                         const AxisPair<Scalar>& axes) {
    const bool free_flip = space.flip_time_mode == FlipTimeMode::free_search;
    detail::validate_axis(space.gamma_c_range[0], space.gamma_c_range[1],
                          space.gamma_c_resolution, "gamma_c");
    detail::validate_axis(space.detuning_range[0], space.detuning_range[1],
                          space.detuning_resolution, "detuning");
    if (free_flip)
        detail::validate_axis(space.flip_time_range[0], space.flip_time_range[1],
                              space.flip_time_resolution, "flip_time");

    Optimum<Scalar> result;
    result.trace.reserve(1024);

    // point = (gamma_c, detuning, flip_time) in gamma_p units
    auto evaluate = [&](Scalar g, Scalar d, Scalar tf) {
        TraceEntry<Scalar> entry{g, d, tf, std::numeric_limits<Scalar>::quiet_NaN(), false};
        if (d == Scalar(0) && !(tf == tf)) {  // binary path needs a real flip time
            result.trace.push_back(entry);
            return std::numeric_limits<Scalar>::infinity();
        }
        try {
            const Scalar tf_abs = (d == Scalar(0) || free_flip) ? tf / gamma_p : Scalar(0);
            entry.b50 = objective(g * gamma_p, d * gamma_p, tf_abs, gamma_p, axes) / gamma_p;
            entry.ok = true;
        } catch (const std::invalid_argument&) {
        }
        result.trace.push_back(entry);
        return entry.ok ? entry.b50 : std::numeric_limits<Scalar>::infinity();
    };
    auto flip_for = [&](Scalar g, Scalar grid_tf) {
        return free_flip ? grid_tf : detail::analytic_flip_nd(g);
    };

    const auto g_values = detail::axis_values(space.gamma_c_range[0], space.gamma_c_range[1],
                                              space.gamma_c_resolution);
    const auto d_values = detail::axis_values(space.detuning_range[0],
                                              space.detuning_range[1],
                                              space.detuning_resolution);
    const auto t_values =
        free_flip ? detail::axis_values(space.flip_time_range[0], space.flip_time_range[1],
                                        space.flip_time_resolution)
                  : std::vector<Scalar>{std::numeric_limits<Scalar>::quiet_NaN()};

    Scalar best_value = std::numeric_limits<Scalar>::infinity();
    std::array<Scalar, 3> best_point{};
    for (const Scalar g : g_values)
        for (const Scalar d : d_values)
            for (const Scalar t : t_values) {
                const Scalar tf = flip_for(g, t);
                const Scalar value = evaluate(g, d, tf);
                if (value < best_value) {
                    best_value = value;
                    best_point = {g, d, tf};
                }
            }
    if (!std::isfinite(best_value))
        throw optimization_failed("minimize: every grid evaluation failed");

    struct Axis {
        int coordinate;  // 0 gamma_c, 1 detuning, 2 flip
        Scalar lo, hi;
    };
    std::vector<Axis> refined;
    if (space.gamma_c_resolution > 1)
        refined.push_back({0, space.gamma_c_range[0], space.gamma_c_range[1]});
    if (space.detuning_resolution > 1)
        refined.push_back({1, space.detuning_range[0], space.detuning_range[1]});
    if (free_flip && space.flip_time_resolution > 1)
        refined.push_back({2, space.flip_time_range[0], space.flip_time_range[1]});

    if (!refined.empty()) {
        auto objective_nd = [&](const ArrayX<Scalar>& x) {
            std::array<Scalar, 3> point = best_point;
            for (size_t j = 0; j < refined.size(); ++j) {
                const Scalar v = x[static_cast<Eigen::Index>(j)];
                if (v < refined[j].lo || v > refined[j].hi)
                    return std::numeric_limits<Scalar>::infinity();
                point[static_cast<size_t>(refined[j].coordinate)] = v;
            }
            if (!free_flip) point[2] = detail::analytic_flip_nd(point[0]);
            return evaluate(point[0], point[1], point[2]);
        };
        ArrayX<Scalar> start(static_cast<Eigen::Index>(refined.size()));
        for (size_t j = 0; j < refined.size(); ++j)
            start[static_cast<Eigen::Index>(j)] =
                best_point[static_cast<size_t>(refined[j].coordinate)];

        SimplexOptions<Scalar> options;
        options.abs_tolerance = Scalar(1e-4);
        const SimplexResult<Scalar> sr = nelder_mead(objective_nd, start, options);
        if (sr.value < best_value) {
            best_value = sr.value;
            for (size_t j = 0; j < refined.size(); ++j)
                best_point[static_cast<size_t>(refined[j].coordinate)] =
                    sr.x[static_cast<Eigen::Index>(j)];
            if (!free_flip) best_point[2] = detail::analytic_flip_nd(best_point[0]);
        }
    }

    result.gamma_c_opt = best_point[0];
    result.detuning_opt = best_point[1];
    result.flip_time_opt = best_point[2];
    result.b50_opt = best_value;
    result.evaluation_count = static_cast<long>(result.trace.size());
    return result;
}

}  // namespace speclens
