// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "convexity/canonical.hpp"
#include "convexity/hessian.hpp"
#include "convexity/scalar_field.hpp"
#include "convexity/spectral.hpp"

namespace convexity {

/// Pointwise convexity diagnostics at one point: Hessian eigenvalues
/// (descending), the lack-of-convexity index loc = sum of negative parts,
/// its normalization nloc = loc / sum|lambda|, and conv = 1 - nloc.
/// A zero Hessian is degenerate and reported as conv = 1 by convention.
struct ConvexityReport {
    std::vector<double> point;
    std::vector<double> eigenvalues;
    double loc = 0.0;
    double nloc = 0.0;
    double conv = 1.0;
    bool degenerate = false;
};

inline ConvexityReport indices_from_hessian(std::span<const double> point,
                                            const SymmetricMatrix& hessian) {
    const EigenDecomposition e = eigendecompose(hessian);
    const PsdIndexReport psd = psd_indices_from_eigenvalues(e.eigenvalues);
    ConvexityReport r;
    r.point.assign(point.begin(), point.end());
    r.eigenvalues = e.eigenvalues;
    r.loc = psd.lops;
    r.nloc = psd.nlops;
    r.conv = psd.ps;
    r.degenerate = psd.degenerate;
    return r;
}

inline ConvexityReport pointwise_indices(const ScalarField& f, std::span<const double> point,
                                         const FdConfig& cfg = {}) {
    return indices_from_hessian(point, hessian_fd(f, point, cfg));
}

/// Result of the one-dimensional index of increase of h'. The integrals run
/// over the effective interval [lo, hi], the requested one trimmed by one
/// finite-difference step on each side so every stencil fits.
struct IncreaseResult {
    double value = 1.0;
    bool degenerate = false;
    double lo = 0.0;
    double hi = 0.0;
};

/// integral of (h'')_+ over integral of |h''|, both by composite Simpson on
/// finite-difference second derivatives. When both integrals vanish (h
/// affine to within noise) the interval carries no curvature and the index
/// is 1 with the degenerate flag set.
inline IncreaseResult index_of_increase_1d(const ScalarField& f, double a, double b,
                                           int grid_nodes, const FdConfig& cfg = {}) {
    validate_fd_config(cfg);
    if (f.dimension() != 1)
        throw precondition_error("index_of_increase_1d needs a one-dimensional field");
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
        throw precondition_error("index_of_increase_1d needs a finite interval with a < b");
    if (grid_nodes < 3 || grid_nodes % 2 == 0)
        throw precondition_error("grid node count must be odd and >= 3");

    const double margin =
        cfg.base_step *
        (cfg.relative_scaling ? std::max({1.0, std::abs(a), std::abs(b)}) : 1.0);
    const double lo = a + margin;
    const double hi = b - margin;
    if (!(lo < hi))
        throw boundary_error("interval is too small for the finite-difference step");

    const double h = (hi - lo) / (grid_nodes - 1);
    double numerator = 0.0;
    double denominator = 0.0;
    std::vector<double> x(1);
    for (int k = 0; k < grid_nodes; ++k) {
        x[0] = lo + k * h;
        const double step = fd_step(cfg, x[0]);
        const double fp = f.evaluate(std::vector<double>{x[0] + step});
        const double f0 = f.evaluate(x);
        const double fm = f.evaluate(std::vector<double>{x[0] - step});
        const double second = (fp - 2.0 * f0 + fm) / (step * step);
        const double w = (k == 0 || k == grid_nodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        numerator += w * std::max(second, 0.0);
        denominator += w * std::abs(second);
    }
    numerator *= h / 3.0;
    denominator *= h / 3.0;

    IncreaseResult r;
    r.lo = lo;
    r.hi = hi;
    if (denominator < 1e-14) {
        r.value = 1.0;
        r.degenerate = true;
        return r;
    }
    r.value = numerator / denominator;
    r.degenerate = false;
    return r;
}

} // namespace convexity
