#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <utility>

#include "speclens/wavepacket.hpp"

namespace speclens {

template <class Scalar>
struct CavityParams {
    Scalar gamma_c;               // cavity linewidth, rad/s
    Scalar detuning = Scalar(0);  // packet-cavity detuning w0 - wc, rad/s
};

// All-pass reflection C(d) = -(Gc + 2 i d)/(Gc - 2 i d), d = w - wc.
template <class Scalar>
std::complex<Scalar> cavity_transfer(Scalar omega_detuning, Scalar gamma_c) {
    if (!(gamma_c > Scalar(0)))
        throw std::invalid_argument("cavity_transfer: gamma_c must be positive");
    const std::complex<Scalar> two_i_d(Scalar(0), Scalar(2) * omega_detuning);
    return -(gamma_c + two_i_d) / (gamma_c - two_i_d);
}

// Psi'(w) = Psi(w) C(w + detuning): grid frequencies are offsets from the
// packet's central frequency w0, so w - wc = w + (w0 - wc).
template <class Scalar>
SpectralWavepacket<Scalar> reflect_off_cavity(const SpectralWavepacket<Scalar>& Psi,
                                              const CavityParams<Scalar>& cavity) {
    SpectralWavepacket<Scalar> out{Psi.axes, ArrayXc<Scalar>(Psi.samples.size())};
    for (Eigen::Index k = 0; k < Psi.samples.size(); ++k)
        out.samples[k] =
            Psi.samples[k] *
            cavity_transfer(Psi.axes.frequency_at(k) + cavity.detuning, cavity.gamma_c);
    return out;
}

// Resonant dispersed envelope in closed form:
// sqrt(Gp) [(Gp+Gc) e^{-Gp t/2} - 2 Gc e^{-Gc t/2}]/(Gp-Gc) Theta(t).
// Sign fixed so the phase is 0 before the zero crossing and pi after it,
// matching what reflect_off_cavity produces; this is +sqrt(Gp) at t -> 0+.
template <class Scalar>
Scalar dispersed_envelope_analytic(Scalar t, Scalar gamma_p, Scalar gamma_c) {
    if (!(gamma_p > Scalar(0)) || !(gamma_c > Scalar(0)))
        throw std::invalid_argument("dispersed_envelope_analytic: widths must be positive");
    if (gamma_p == gamma_c)
        throw std::invalid_argument(
            "dispersed_envelope_analytic: degenerate gamma_p == gamma_c");
    if (t < Scalar(0)) return Scalar(0);
    const Scalar bracket = (gamma_p + gamma_c) * std::exp(-gamma_p * t / Scalar(2)) -
                           Scalar(2) * gamma_c * std::exp(-gamma_c * t / Scalar(2));
    return std::sqrt(gamma_p) * bracket / (gamma_p - gamma_c);
}

// Zero of the dispersed envelope: t_flip = 2 ln((Gp+Gc)/(2 Gc))/(Gp-Gc).
template <class Scalar>
Scalar binary_flip_time(Scalar gamma_p, Scalar gamma_c) {
    if (!(gamma_p > gamma_c) || !(gamma_c > Scalar(0)))
        throw std::invalid_argument("binary_flip_time: requires gamma_p > gamma_c > 0");
    return Scalar(2) * std::log((gamma_p + gamma_c) / (Scalar(2) * gamma_c)) /
           (gamma_p - gamma_c);
}

template <class Scalar>
struct ModulatorSchedule {
    enum class Mode { binary_flip, conjugate };

    Mode mode;
    Scalar flip_time = Scalar(0);    // binary mode
    ArrayX<Scalar> phase_samples;    // conjugate mode, radians per time sample

    static ModulatorSchedule binary(Scalar flip_time) {
        return {Mode::binary_flip, flip_time, {}};
    }
    static ModulatorSchedule conjugate(ArrayX<Scalar> phase_samples) {
        return {Mode::conjugate, Scalar(0), std::move(phase_samples)};
    }
};

// Binary mode: samples with t >= flip_time pick up e^{i pi} = -1.
// Conjugate mode: samples pick up e^{i phi_e(t)}.
template <class Scalar>
TemporalWavepacket<Scalar> apply_modulator(const TemporalWavepacket<Scalar>& psi,
                                           const ModulatorSchedule<Scalar>& schedule) {
    TemporalWavepacket<Scalar> out{psi.axes, psi.samples};
    if (schedule.mode == ModulatorSchedule<Scalar>::Mode::binary_flip) {
        const Scalar t_last = psi.axes.time_at(psi.axes.n_samples - 1);
        if (schedule.flip_time < psi.axes.time_origin || schedule.flip_time > t_last)
            throw std::invalid_argument("apply_modulator: flip_time outside the time grid");
        for (Eigen::Index i = 0; i < out.samples.size(); ++i)
            if (psi.axes.time_at(i) >= schedule.flip_time) out.samples[i] = -out.samples[i];
    } else {
        if (schedule.phase_samples.size() != psi.axes.n_samples)
            throw std::invalid_argument("apply_modulator: phase sample count != grid size");
        for (Eigen::Index i = 0; i < out.samples.size(); ++i)
            out.samples[i] *= std::polar(Scalar(1), schedule.phase_samples[i]);
    }
    return out;
}

}  // namespace speclens
