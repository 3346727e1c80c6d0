#pragma once

#include <numbers>

namespace speclens {

// User-facing linewidths are ordinary-frequency MHz (FWHM); internals use
// angular rad/s throughout.
template <class Scalar>
constexpr Scalar mhz_to_rad_per_s(Scalar mhz) {
    return Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(1e6) * mhz;
}

template <class Scalar>
constexpr Scalar rad_per_s_to_mhz(Scalar omega) {
    return omega / (Scalar(2) * std::numbers::pi_v<Scalar> * Scalar(1e6));
}

template <class Scalar>
constexpr Scalar ns_to_s(Scalar ns) {
    return ns * Scalar(1e-9);
}

template <class Scalar>
constexpr Scalar s_to_ns(Scalar s) {
    return s * Scalar(1e9);
}

}  // namespace speclens
