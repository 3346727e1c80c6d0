#pragma once

#include <cmath>
#include <stdexcept>

#include "speclens/metrics.hpp"
#include "speclens/wavepacket.hpp"

namespace speclens {

template <class Scalar>
struct FPParams {
    Scalar gamma_fp;  // scanning-cavity linewidth (Lorentzian FWHM), rad/s
};

template <class Scalar>
struct ScanResult {
    ArrayX<Scalar> detunings;  // rad/s
    ArrayX<Scalar> rates;      // relative transmitted energy per detuning
};

// Unit-peak Lorentzian transmission, FWHM gamma_fp.
template <class Scalar>
Scalar fp_transmission_profile(Scalar omega, const FPParams<Scalar>& fp) {
    if (!(fp.gamma_fp > Scalar(0)))
        throw std::invalid_argument("fp_transmission_profile: gamma_fp must be positive");
    const Scalar hw = fp.gamma_fp / Scalar(2);
    return hw * hw / (omega * omega + hw * hw);
}

// rate(w_d) = sum_w |Psi(w)|^2 L(w - w_d) dw: power spectrum convolved with
// the filter line, sampled at the requested detunings.
template <class Scalar>
ScanResult<Scalar> scan(const SpectralWavepacket<Scalar>& Psi, const FPParams<Scalar>& fp,
                        const ArrayX<Scalar>& detunings) {
    const Scalar w_min = Psi.axes.frequency_at(0);
    const Scalar w_max = Psi.axes.frequency_at(Psi.axes.n_samples - 1);
    for (Eigen::Index d = 0; d < detunings.size(); ++d)
        if (detunings[d] < w_min || detunings[d] > w_max)
            throw std::invalid_argument("scan: detuning outside the frequency grid");

    const ArrayX<Scalar> density = power_spectrum(Psi);
    const ArrayX<Scalar> omegas = Psi.axes.frequencies();
    ScanResult<Scalar> out{detunings, ArrayX<Scalar>(detunings.size())};
    const Scalar hw = fp.gamma_fp / Scalar(2);
    if (!(hw > Scalar(0)))
        throw std::invalid_argument("scan: gamma_fp must be positive");
    for (Eigen::Index d = 0; d < detunings.size(); ++d) {
        const ArrayX<Scalar> offset = omegas - detunings[d];
        out.rates[d] =
            (density * (hw * hw) / (offset.square() + hw * hw)).sum() * Psi.axes.frequency_step;
    }
    return out;
}

// S(w) = (A/pi) (2 Gp / (4 w^2 + Gp^2)) exp(-OD Ga^2 / (4 w^2 + Ga^2)):
// Lorentzian emission line attenuated by resonant self-absorption.
template <class Scalar>
Scalar reabsorbed_spectrum(Scalar omega, Scalar od, Scalar gamma_p, Scalar gamma_a,
                           Scalar scale) {
    if (!(od >= Scalar(0)))
        throw std::invalid_argument("reabsorbed_spectrum: od must be non-negative");
    if (!(gamma_p > Scalar(0)) || !(gamma_a > Scalar(0)))
        throw std::invalid_argument("reabsorbed_spectrum: widths must be positive");
    constexpr Scalar pi = std::numbers::pi_v<Scalar>;
    const Scalar four_w2 = Scalar(4) * omega * omega;
    const Scalar lorentzian = Scalar(2) * gamma_p / (four_w2 + gamma_p * gamma_p);
    const Scalar absorption = std::exp(-od * gamma_a * gamma_a / (four_w2 + gamma_a * gamma_a));
    return scale / pi * lorentzian * absorption;
}

}  // namespace speclens
