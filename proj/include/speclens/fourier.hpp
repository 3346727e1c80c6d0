#pragma once

#include <complex>
#include <numbers>

#include <unsupported/Eigen/FFT>

#include "speclens/wavepacket.hpp"

namespace speclens {

// Unitary pair with e^{+i w t} forward kernel:
//   Psi(w) = (1/sqrt(2 pi)) sum_t psi(t) e^{+i w t} dt
//   psi(t) = (1/sqrt(2 pi)) sum_w Psi(w) e^{-i w t} dw
// On the shifted grids (t_n = t0 + n dt, w_k = (k - N/2) dw) this maps to a
// plain DFT after a (-1)^n fold and an e^{+/- i w t0} twist.

namespace detail {

template <class Scalar>
Eigen::FFT<Scalar>& fft_engine() {
    static thread_local Eigen::FFT<Scalar> engine;
    return engine;
}

}  // namespace detail

template <class Scalar>
SpectralWavepacket<Scalar> forward_transform(const TemporalWavepacket<Scalar>& psi) {
    const Eigen::Index n = psi.axes.n_samples;
    if (psi.samples.size() != n)
        throw std::invalid_argument("forward_transform: sample count != grid size");

    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> folded(n);
    for (Eigen::Index i = 0; i < n; ++i)
        folded[i] = (i & 1) ? -psi.samples[i] : psi.samples[i];

    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> transformed;
    detail::fft_engine<Scalar>().inv(transformed, folded);

    const Scalar scale =
        psi.axes.time_step * Scalar(n) / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
    SpectralWavepacket<Scalar> out{psi.axes, ArrayXc<Scalar>(n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        const Scalar phase = psi.axes.frequency_at(k) * psi.axes.time_origin;
        out.samples[k] = scale * std::polar(Scalar(1), phase) * transformed[k];
    }
    return out;
}

template <class Scalar>
TemporalWavepacket<Scalar> inverse_transform(const SpectralWavepacket<Scalar>& Psi) {
    const Eigen::Index n = Psi.axes.n_samples;
    if (Psi.samples.size() != n)
        throw std::invalid_argument("inverse_transform: sample count != grid size");

    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> twisted(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Scalar phase = -Psi.axes.frequency_at(k) * Psi.axes.time_origin;
        twisted[k] = std::polar(Scalar(1), phase) * Psi.samples[k];
    }

    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> transformed;
    detail::fft_engine<Scalar>().fwd(transformed, twisted);

    const Scalar scale =
        Psi.axes.frequency_step / std::sqrt(Scalar(2) * std::numbers::pi_v<Scalar>);
    TemporalWavepacket<Scalar> out{Psi.axes, ArrayXc<Scalar>(n)};
    for (Eigen::Index i = 0; i < n; ++i)
        out.samples[i] = ((i & 1) ? -scale : scale) * transformed[i];
    return out;
}

}  // namespace speclens
