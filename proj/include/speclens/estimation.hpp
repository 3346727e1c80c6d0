#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "speclens/simplex.hpp"
#include "speclens/spectroscopy.hpp"

namespace speclens {

template <class Scalar>
struct DataSeries {
    ArrayX<Scalar> x;
    ArrayX<Scalar> y;
    ArrayX<Scalar> y_err;  // optional standard errors; empty means unweighted
};

template <class Scalar>
struct FitResult {
    std::vector<std::string> names;
    ArrayX<Scalar> values;
    std::vector<std::pair<std::string, Scalar>> derived;  // reported, not fitted
    Scalar residual_norm = Scalar(0);
    bool converged = false;
    int iterations = 0;
    long evaluations = 0;
    std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> covariance;

    Scalar value(const std::string& name) const {
        for (size_t i = 0; i < names.size(); ++i)
            if (names[i] == name) return values[static_cast<Eigen::Index>(i)];
        for (const auto& [key, v] : derived)
            if (key == name) return v;
        throw std::invalid_argument("FitResult: unknown parameter " + name);
    }
    std::optional<Scalar> standard_error(Eigen::Index i) const {
        if (!covariance || (*covariance)(i, i) < Scalar(0)) return {};
        return std::sqrt((*covariance)(i, i));
    }
};

namespace detail {

// Covariance from the quadratic model at the optimum: SSE(p) ~ SSE* +
// (1/2) d' H d, cov = 2 s^2 H^{-1} with s^2 = SSE*/(n-p) (s^2 = 1 when the
// data carry their own standard errors).
template <class Scalar, class SSE>
std::optional<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> quadratic_covariance(
    SSE&& sse, const ArrayX<Scalar>& p, Scalar scale) {
    const Eigen::Index np = p.size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> hessian(np, np);
    ArrayX<Scalar> h(np);
    for (Eigen::Index j = 0; j < np; ++j)
        h[j] = Scalar(1e-4) * (std::abs(p[j]) > Scalar(0) ? std::abs(p[j]) : Scalar(1e-8));

    const Scalar f0 = sse(p);
    for (Eigen::Index i = 0; i < np; ++i) {
        ArrayX<Scalar> pp = p, pm = p;
        pp[i] += h[i];
        pm[i] -= h[i];
        hessian(i, i) = (sse(pp) - Scalar(2) * f0 + sse(pm)) / (h[i] * h[i]);
        for (Eigen::Index j = i + 1; j < np; ++j) {
            ArrayX<Scalar> a = p, b = p, c = p, d = p;
            a[i] += h[i];
            a[j] += h[j];
            b[i] += h[i];
            b[j] -= h[j];
            c[i] -= h[i];
            c[j] += h[j];
            d[i] -= h[i];
            d[j] -= h[j];
            hessian(i, j) = hessian(j, i) =
                (sse(a) - sse(b) - sse(c) + sse(d)) / (Scalar(4) * h[i] * h[j]);
        }
    }
    if (!hessian.allFinite()) return {};
    Eigen::LDLT<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> ldlt(hessian);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return {};
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> cov =
        ldlt.solve(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Identity(np, np));
    cov *= Scalar(2) * scale;
    if (!cov.allFinite()) return {};
    return cov;
}

}  // namespace detail

// Weighted sum-of-squares fit via simplex descent with one deterministic
// restart. Out-of-bounds trial points are rejected as +inf.
template <class Scalar, class Model>
FitResult<Scalar> least_squares(Model&& model, const DataSeries<Scalar>& data,
                                const ArrayX<Scalar>& initial, const ArrayX<Scalar>& lower,
                                const ArrayX<Scalar>& upper,
                                std::vector<std::string> names = {}) {
    const Eigen::Index n = data.x.size();
    const Eigen::Index np = initial.size();
    if (data.y.size() != n || (data.y_err.size() != 0 && data.y_err.size() != n))
        throw std::invalid_argument("least_squares: mismatched series lengths");
    if (n < np + 1)
        throw std::invalid_argument("least_squares: fewer data points than parameters + 1");
    if (lower.size() != np || upper.size() != np)
        throw std::invalid_argument("least_squares: bounds size != parameter count");
    for (Eigen::Index j = 0; j < np; ++j) {
        if (!(lower[j] <= upper[j]))
            throw std::invalid_argument("least_squares: invalid bounds (lower > upper)");
        if (initial[j] < lower[j] || initial[j] > upper[j])
            throw std::invalid_argument("least_squares: initial point outside bounds");
    }

    ArrayX<Scalar> weights = ArrayX<Scalar>::Ones(n);
    if (data.y_err.size() == n) {
        if ((data.y_err <= Scalar(0)).any())
            throw std::invalid_argument("least_squares: y_err must be positive");
        weights = data.y_err.square().inverse();
    }

    auto sse = [&](const ArrayX<Scalar>& p) {
        Scalar acc = Scalar(0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const Scalar r = data.y[i] - model(data.x[i], p);
            acc += weights[i] * r * r;
        }
        return acc;
    };
    auto bounded = [&](const ArrayX<Scalar>& p) {
        for (Eigen::Index j = 0; j < p.size(); ++j)
            if (p[j] < lower[j] || p[j] > upper[j])
                return std::numeric_limits<Scalar>::infinity();
        return sse(p);
    };

    SimplexOptions<Scalar> options;
    options.rel_tolerance = Scalar(1e-10);
    const SimplexResult<Scalar> sr = nelder_mead(bounded, initial, options);

    FitResult<Scalar> fit;
    fit.names = names.empty() ? std::vector<std::string>() : std::move(names);
    if (fit.names.empty())
        for (Eigen::Index j = 0; j < np; ++j) fit.names.push_back("p" + std::to_string(j));
    fit.values = sr.x;
    fit.residual_norm = std::sqrt(sr.value);
    fit.converged = sr.converged && std::isfinite(sr.value);
    fit.iterations = sr.iterations;
    fit.evaluations = sr.evaluations;
    if (n > np && std::isfinite(sr.value)) {
        const Scalar scale =
            (data.y_err.size() == n) ? Scalar(1) : sr.value / Scalar(n - np);
        fit.covariance = detail::quadratic_covariance<Scalar>(bounded, sr.x, scale);
    }
    return fit;
}

// A e^{-Gp (t - t0)} Theta(t - t0) against binned counts; reports Gp in rad/s
// and ordinary-frequency MHz.
template <class Scalar>
FitResult<Scalar> fit_exponential_decay(const DataSeries<Scalar>& hist) {
    const Eigen::Index n = hist.x.size();
    if (n < 4)
        throw std::invalid_argument("fit_exponential_decay: need at least 4 points");

    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    std::iota(idx.begin(), idx.end(), Eigen::Index{0});
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return hist.x[a] < hist.x[b]; });
    bool decays = false;
    for (size_t i = 1; i < idx.size(); ++i)
        if (hist.y[idx[i]] < hist.y[idx[i - 1]]) decays = true;
    if (!decays)
        throw std::invalid_argument("fit_exponential_decay: data never decay");

    Eigen::Index peak = 0;
    hist.y.maxCoeff(&peak);
    const Scalar t_peak = hist.x[peak];
    const Scalar y_peak = hist.y[peak];
    const Scalar x_min = hist.x.minCoeff();
    const Scalar x_max = hist.x.maxCoeff();
    const Scalar span = x_max - x_min;

    // log-slope over the decaying flank seeds gamma
    Scalar sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (hist.x[i] <= t_peak || !(hist.y[i] > y_peak * Scalar(0.02))) continue;
        const Scalar ly = std::log(hist.y[i]);
        sx += hist.x[i];
        sy += ly;
        sxx += hist.x[i] * hist.x[i];
        sxy += hist.x[i] * ly;
        ++m;
    }
    Scalar gamma0 = Scalar(4) / (span > Scalar(0) ? span : Scalar(1));
    if (m >= 2) {
        const Scalar denom = Scalar(m) * sxx - sx * sx;
        if (denom > Scalar(0)) {
            const Scalar slope = (Scalar(m) * sxy - sx * sy) / denom;
            if (slope < Scalar(0)) gamma0 = -slope;
        }
    }

    ArrayX<Scalar> initial(3), lower(3), upper(3);
    initial << y_peak, gamma0, t_peak;
    lower << Scalar(0), Scalar(0), x_min - span;
    upper << std::numeric_limits<Scalar>::infinity(), std::numeric_limits<Scalar>::infinity(),
        x_max;

    auto model = [](Scalar t, const ArrayX<Scalar>& p) {
        return t >= p[2] ? p[0] * std::exp(-p[1] * (t - p[2])) : Scalar(0);
    };
    FitResult<Scalar> fit = least_squares(model, hist, initial, lower, upper,
                                          {"amplitude", "gamma_p", "t0"});
    constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    fit.derived.emplace_back("gamma_p_mhz", fit.value("gamma_p") / (two_pi * Scalar(1e6)));
    return fit;
}

// Reabsorbed Lorentzian with gamma_p, gamma_a held fixed; fits
// optical density and overall scale.
template <class Scalar>
FitResult<Scalar> fit_reabsorption(const DataSeries<Scalar>& scan, Scalar gamma_p,
                                   Scalar gamma_a) {
    if (!(gamma_p > Scalar(0)) || !(gamma_a > Scalar(0)))
        throw std::invalid_argument("fit_reabsorption: widths must be positive");
    const Eigen::Index n = scan.x.size();
    if (n < 3) throw std::invalid_argument("fit_reabsorption: need at least 3 points");

    Eigen::Index center = 0;
    scan.x.abs().minCoeff(&center);
    const Scalar od0 = Scalar(0.5);
    const Scalar y0 = std::max(scan.y[center], scan.y.maxCoeff() * Scalar(1e-3));
    const Scalar scale0 =
        y0 * std::numbers::pi_v<Scalar> * gamma_p / Scalar(2) * std::exp(od0);

    ArrayX<Scalar> initial(2), lower(2), upper(2);
    initial << od0, scale0;
    lower << Scalar(0), Scalar(0);
    upper << std::numeric_limits<Scalar>::infinity(), std::numeric_limits<Scalar>::infinity();

    auto model = [gamma_p, gamma_a](Scalar w, const ArrayX<Scalar>& p) {
        return reabsorbed_spectrum(w, p[0], gamma_p, gamma_a, p[1]);
    };
    return least_squares(model, scan, initial, lower, upper, {"od", "scale"});
}

}  // namespace speclens
