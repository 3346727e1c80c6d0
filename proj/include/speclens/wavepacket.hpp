#pragma once

#include <cmath>
#include <complex>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "speclens/axis.hpp"

namespace speclens {

// Complex envelope on the time grid, samples in units of s^{-1/2}.
template <class Scalar>
struct TemporalWavepacket {
    AxisPair<Scalar> axes;
    ArrayXc<Scalar> samples;
};

// Complex amplitude on the frequency grid, samples in units of (rad/s)^{-1/2}.
template <class Scalar>
struct SpectralWavepacket {
    AxisPair<Scalar> axes;
    ArrayXc<Scalar> samples;
};

template <class Scalar>
struct PhotonParams {
    Scalar gamma_p;              // decay/bandwidth constant, rad/s
    Scalar t0 = Scalar(0);       // herald time, s
};

template <class Scalar>
Scalar total_energy(const TemporalWavepacket<Scalar>& psi) {
    return psi.samples.abs2().sum() * psi.axes.time_step;
}

template <class Scalar>
Scalar total_energy(const SpectralWavepacket<Scalar>& Psi) {
    return Psi.samples.abs2().sum() * Psi.axes.frequency_step;
}

// psi(t) = sqrt(Gp) e^{-Gp (t - t0)/2} Theta(t - t0), Theta(0) = 1, then
// rescaled to unit energy on the grid.
template <class Scalar>
TemporalWavepacket<Scalar> heralded_exponential(const PhotonParams<Scalar>& params,
                                                const AxisPair<Scalar>& axes) {
    if (!(params.gamma_p > Scalar(0)))
        throw std::invalid_argument("heralded_exponential: gamma_p must be positive");
    const Scalar t_last = axes.time_at(axes.n_samples - 1);
    if (params.t0 < axes.time_origin || params.t0 > t_last)
        throw std::invalid_argument("heralded_exponential: t0 outside the time grid");
    if (axes.time_span() * params.gamma_p < Scalar(40))
        std::cerr << "heralded_exponential: time span below 40/gamma_p, "
                     "truncation may exceed tolerances\n";

    TemporalWavepacket<Scalar> psi{axes, ArrayXc<Scalar>::Zero(axes.n_samples)};
    const Scalar amp = std::sqrt(params.gamma_p);
    for (Eigen::Index i = 0; i < axes.n_samples; ++i) {
        const Scalar t = axes.time_at(i);
        if (t >= params.t0)
            psi.samples[i] = amp * std::exp(-params.gamma_p * (t - params.t0) / Scalar(2));
    }
    psi.samples /= std::sqrt(total_energy(psi));
    return psi;
}

// Per-sample unwrapped phase; samples with intensity below floor * peak are
// flagged undefined and reset the unwrap accumulator.
template <class Scalar>
struct PhaseSamples {
    ArrayX<Scalar> phase;
    Eigen::Array<bool, Eigen::Dynamic, 1> defined;
};

template <class Scalar>
PhaseSamples<Scalar> extract_phase(const TemporalWavepacket<Scalar>& psi,
                                   Scalar intensity_floor) {
    if (!(intensity_floor >= Scalar(0)))
        throw std::invalid_argument("extract_phase: intensity_floor must be non-negative");
    const Eigen::Index n = psi.samples.size();
    const Scalar threshold = intensity_floor * psi.samples.abs2().maxCoeff();
    PhaseSamples<Scalar> out{ArrayX<Scalar>::Zero(n),
                             Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false)};

    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    bool in_run = false;
    Scalar prev = Scalar(0);
    Scalar offset = Scalar(0);
    bool any = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (psi.samples[i] == std::complex<Scalar>(0) || std::norm(psi.samples[i]) < threshold) {
            in_run = false;
            continue;
        }
        const Scalar raw = std::arg(psi.samples[i]);
        if (!in_run) {
            offset = Scalar(0);  // gap resets the accumulator
        } else {
            Scalar delta = raw + offset - prev;
            while (delta > pi) {
                offset -= Scalar(2) * pi;
                delta -= Scalar(2) * pi;
            }
            while (delta < -pi) {
                offset += Scalar(2) * pi;
                delta += Scalar(2) * pi;
            }
        }
        out.phase[i] = raw + offset;
        out.defined[i] = true;
        prev = out.phase[i];
        in_run = true;
        any = true;
    }
    if (!any) throw std::invalid_argument("extract_phase: all samples below intensity floor");
    return out;
}

}  // namespace speclens
