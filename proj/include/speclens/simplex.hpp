#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "speclens/axis.hpp"

namespace speclens {

template <class Scalar>
struct SimplexOptions {
    Scalar abs_tolerance = Scalar(0);  // per-coordinate simplex spread
    Scalar rel_tolerance = Scalar(0);  // relative to the best vertex
    int max_iterations = 10000;
    int restarts = 1;  // deterministic re-initialization around the best point
};

template <class Scalar>
struct SimplexResult {
    ArrayX<Scalar> x;
    Scalar value = std::numeric_limits<Scalar>::infinity();
    bool converged = false;
    int iterations = 0;
    long evaluations = 0;
};

// Nelder-Mead downhill simplex, deterministic throughout. Out-of-domain or
// NaN objective values are treated as +inf (worst), which confines the walk
// without derivative information.
template <class Scalar, class F>
SimplexResult<Scalar> nelder_mead(F&& objective, const ArrayX<Scalar>& start,
                                  const SimplexOptions<Scalar>& options = {}) {
    const Eigen::Index dim = start.size();
    SimplexResult<Scalar> result;
    result.x = start;

    auto guarded = [&](const ArrayX<Scalar>& x) {
        const Scalar f = objective(x);
        ++result.evaluations;
        const Scalar value = std::isnan(f) ? std::numeric_limits<Scalar>::infinity() : f;
        if (value < result.value) {
            result.value = value;
            result.x = x;
        }
        return value;
    };

    std::vector<ArrayX<Scalar>> vertex;
    std::vector<Scalar> height;
    auto initialize = [&](const ArrayX<Scalar>& center) {
        vertex.assign(1, center);
        for (Eigen::Index j = 0; j < dim; ++j) {
            ArrayX<Scalar> v = center;
            v[j] = (v[j] == Scalar(0)) ? Scalar(0.00025) : v[j] * Scalar(1.05);
            vertex.push_back(v);
        }
        height.resize(vertex.size());
        for (size_t i = 0; i < vertex.size(); ++i) height[i] = guarded(vertex[i]);
    };
    auto order = [&] {
        std::vector<size_t> idx(vertex.size());
        std::iota(idx.begin(), idx.end(), size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](size_t a, size_t b) { return height[a] < height[b]; });
        std::vector<ArrayX<Scalar>> v2;
        std::vector<Scalar> h2;
        for (size_t i : idx) {
            v2.push_back(vertex[i]);
            h2.push_back(height[i]);
        }
        vertex.swap(v2);
        height.swap(h2);
    };
    auto spread_ok = [&] {
        for (Eigen::Index j = 0; j < dim; ++j) {
            Scalar lo = vertex[0][j], hi = vertex[0][j];
            for (const auto& v : vertex) {
                lo = std::min(lo, v[j]);
                hi = std::max(hi, v[j]);
            }
            const Scalar allowed = std::max(options.abs_tolerance,
                                            options.rel_tolerance * std::abs(vertex[0][j]));
            if (hi - lo > allowed) return false;
        }
        return true;
    };

    if (dim == 0) {
        guarded(start);
        result.converged = true;
        return result;
    }

    for (int round = 0; round <= options.restarts; ++round) {
        initialize(round == 0 ? start : result.x);
        result.converged = false;
        while (result.iterations < options.max_iterations) {
            order();
            if (spread_ok()) {
                result.converged = true;
                break;
            }
            ++result.iterations;

            ArrayX<Scalar> centroid = ArrayX<Scalar>::Zero(dim);
            for (size_t i = 0; i + 1 < vertex.size(); ++i) centroid += vertex[i];
            centroid /= Scalar(dim);

            const size_t worst = vertex.size() - 1;
            const ArrayX<Scalar> reflected = centroid + (centroid - vertex[worst]);
            const Scalar fr = guarded(reflected);
            if (fr < height[0]) {
                const ArrayX<Scalar> expanded =
                    centroid + Scalar(2) * (centroid - vertex[worst]);
                const Scalar fe = guarded(expanded);
                if (fe < fr) {
                    vertex[worst] = expanded;
                    height[worst] = fe;
                } else {
                    vertex[worst] = reflected;
                    height[worst] = fr;
                }
            } else if (fr < height[worst - 1]) {
                vertex[worst] = reflected;
                height[worst] = fr;
            } else {
                bool shrink = false;
                if (fr < height[worst]) {
                    const ArrayX<Scalar> outside =
                        centroid + Scalar(0.5) * (centroid - vertex[worst]);
                    const Scalar fc = guarded(outside);
                    if (fc <= fr) {
                        vertex[worst] = outside;
                        height[worst] = fc;
                    } else {
                        shrink = true;
                    }
                } else {
                    const ArrayX<Scalar> inside =
                        centroid - Scalar(0.5) * (centroid - vertex[worst]);
                    const Scalar fc = guarded(inside);
                    if (fc < height[worst]) {
                        vertex[worst] = inside;
                        height[worst] = fc;
                    } else {
                        shrink = true;
                    }
                }
                if (shrink) {
                    for (size_t i = 1; i < vertex.size(); ++i) {
                        vertex[i] = vertex[0] + Scalar(0.5) * (vertex[i] - vertex[0]);
                        height[i] = guarded(vertex[i]);
                    }
                }
            }
        }
    }
    return result;
}

}  // namespace speclens
