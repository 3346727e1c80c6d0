#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Core>

namespace speclens {

template <class Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;
template <class Scalar>
using ArrayXc = Eigen::Array<std::complex<Scalar>, Eigen::Dynamic, 1>;

// Conjugate uniform grids: time samples t_n = origin + n*dt, angular-frequency
// samples w_k = (k - n/2)*dw, zero-centered and monotone increasing.
template <class Scalar>
struct AxisPair {
    Eigen::Index n_samples = 0;
    Scalar time_step = Scalar(0);
    Scalar time_origin = Scalar(0);
    Scalar frequency_step = Scalar(0);

    Scalar time_span() const { return time_step * Scalar(n_samples); }
    Scalar time_at(Eigen::Index i) const { return time_origin + time_step * Scalar(i); }
    Scalar frequency_at(Eigen::Index k) const {
        return frequency_step * Scalar(k - n_samples / 2);
    }
    ArrayX<Scalar> times() const {
        return time_origin +
               time_step * ArrayX<Scalar>::LinSpaced(n_samples, Scalar(0), Scalar(n_samples - 1));
    }
    ArrayX<Scalar> frequencies() const {
        return frequency_step * ArrayX<Scalar>::LinSpaced(n_samples, Scalar(-(n_samples / 2)),
                                                          Scalar(n_samples - 1 - n_samples / 2));
    }

    bool operator==(const AxisPair&) const = default;
};

template <class Scalar>
AxisPair<Scalar> make_axis_pair(Eigen::Index n_samples, Scalar time_span, Scalar time_origin) {
    if (n_samples < 16 || (n_samples & (n_samples - 1)) != 0)
        throw std::invalid_argument("make_axis_pair: n_samples must be a power of two >= 16");
    if (!(time_span > Scalar(0)))
        throw std::invalid_argument("make_axis_pair: time_span must be positive");
    AxisPair<Scalar> axes;
    axes.n_samples = n_samples;
    axes.time_step = time_span / Scalar(n_samples);
    axes.time_origin = time_origin;
    axes.frequency_step =
        Scalar(2) * std::numbers::pi_v<Scalar> / (Scalar(n_samples) * axes.time_step);
    return axes;
}

}  // namespace speclens
