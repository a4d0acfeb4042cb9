// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "convexity/errors.hpp"
#include "convexity/scalar_field.hpp"
#include "convexity/symmetric_matrix.hpp"

namespace convexity {

enum class BoundaryMode { shrink, reject };

/// Central finite-difference configuration. With relative scaling the
/// per-axis step is base_step * max(1, |x_i|).
struct FdConfig {
    double base_step = 1e-4;
    bool relative_scaling = true;
    BoundaryMode boundary = BoundaryMode::shrink;
};

inline void validate_fd_config(const FdConfig& cfg) {
    if (!(cfg.base_step > 0.0) || !(cfg.base_step <= 0.1))
        throw precondition_error("fd base step must lie in (0, 0.1]");
}

inline double fd_step(const FdConfig& cfg, double x) {
    return cfg.base_step * (cfg.relative_scaling ? std::max(1.0, std::abs(x)) : 1.0);
}

namespace detail {

inline constexpr int kMaxStepHalvings = 8;

inline double eval_shifted(const ScalarField& f, std::vector<double>& buf,
                           std::span<const double> point, std::size_t i, double di,
                           std::size_t j, double dj) {
    buf.assign(point.begin(), point.end());
    buf[i] += di;
    if (i != j || dj != 0.0) buf[j] += dj;
    return f.evaluate(buf);
}

} // namespace detail

/// Hessian by central differences.
///
/// Diagonal: (f(x+h e_i) - 2 f(x) + f(x-h e_i)) / h^2. Off-diagonal: the
/// 4-point cross stencil / (4 h_i h_j). In shrink mode a stencil that exits
/// the domain hint (or fails to evaluate) has its steps halved up to 8 times
/// before a boundary error is raised; one-sided stencils are never used.
inline SymmetricMatrix hessian_fd(const ScalarField& f, std::span<const double> point,
                                  const FdConfig& cfg = {}) {
    validate_fd_config(cfg);
    const std::size_t d = f.dimension();
    if (point.size() != d)
        throw precondition_error("point dimension mismatch in hessian_fd");
    for (double x : point)
        if (!std::isfinite(x)) throw precondition_error("hessian_fd point must be finite");

    std::vector<double> steps(d);
    for (std::size_t i = 0; i < d; ++i) steps[i] = fd_step(cfg, point[i]);

    if (f.domain_hint()) {
        const HyperRect& hint = *f.domain_hint();
        if (!hint.contains(point))
            throw boundary_error("point " + format_point(point) + " lies outside the domain of " +
                                 (f.name().empty() ? "the field" : "'" + f.name() + "'"));
        for (std::size_t i = 0; i < d; ++i) {
            int halvings = 0;
            while (point[i] - steps[i] < hint.lo[i] || point[i] + steps[i] > hint.hi[i]) {
                if (cfg.boundary == BoundaryMode::reject || halvings == detail::kMaxStepHalvings)
                    throw boundary_error("finite-difference stencil exits the domain near " +
                                         format_point(point));
                steps[i] *= 0.5;
                ++halvings;
            }
        }
    }

    std::vector<double> buf(d);
    double f0;
    try {
        f0 = f.evaluate(point);
    } catch (const eval_error& e) {
        throw boundary_error("cannot evaluate field at " + format_point(point) + ": " + e.what());
    }

    std::vector<double> raw(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
        double h = steps[i];
        for (int attempt = 0;; ++attempt) {
            try {
                const double fp = detail::eval_shifted(f, buf, point, i, +h, i, 0.0);
                const double fm = detail::eval_shifted(f, buf, point, i, -h, i, 0.0);
                raw[i * d + i] = (fp - 2.0 * f0 + fm) / (h * h);
                break;
            } catch (const eval_error& e) {
                if (cfg.boundary == BoundaryMode::reject || attempt == detail::kMaxStepHalvings)
                    throw boundary_error("stencil evaluation failed near " + format_point(point) +
                                         ": " + e.what());
                h *= 0.5;
            }
        }
    }
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            double hi = steps[i], hj = steps[j];
            for (int attempt = 0;; ++attempt) {
                try {
                    const double fpp = detail::eval_shifted(f, buf, point, i, +hi, j, +hj);
                    const double fpm = detail::eval_shifted(f, buf, point, i, +hi, j, -hj);
                    const double fmp = detail::eval_shifted(f, buf, point, i, -hi, j, +hj);
                    const double fmm = detail::eval_shifted(f, buf, point, i, -hi, j, -hj);
                    const double v = (fpp - fpm - fmp + fmm) / (4.0 * hi * hj);
                    raw[i * d + j] = v;
                    raw[j * d + i] = v;
                    break;
                } catch (const eval_error& e) {
                    if (cfg.boundary == BoundaryMode::reject ||
                        attempt == detail::kMaxStepHalvings)
                        throw boundary_error("stencil evaluation failed near " +
                                             format_point(point) + ": " + e.what());
                    hi *= 0.5;
                    hj *= 0.5;
                }
            }
        }
    }
    return SymmetricMatrix(d, raw);
}

} // namespace convexity
