// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "convexity/symmetric_matrix.hpp"

namespace convexity {

/// Full eigensystem of a symmetric matrix: eigenvalues sorted descending,
/// eigenvectors stored column-aligned with them (row-major Q, column k is
/// the unit eigenvector of eigenvalues[k]).
struct EigenDecomposition {
    std::size_t dim = 0;
    std::vector<double> eigenvalues;
    std::vector<double> eigenvectors;

    double eigenvector(std::size_t i, std::size_t k) const {
        return eigenvectors[i * dim + k];
    }

    /// Rebuild Q * diag(d) * Q^T for an arbitrary diagonal d.
    SymmetricMatrix reassemble(std::span<const double> diag) const {
        std::vector<double> raw(dim * dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = i; j < dim; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < dim; ++k)
                    s += eigenvectors[i * dim + k] * diag[k] * eigenvectors[j * dim + k];
                raw[i * dim + j] = s;
                raw[j * dim + i] = s;
            }
        }
        return SymmetricMatrix(dim, raw);
    }
};

namespace detail {

inline double off_diagonal_frobenius(std::span<const double> a, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) s += a[i * n + j] * a[i * n + j];
    return std::sqrt(s);
}

} // namespace detail

/// Cyclic Jacobi eigensolver. Sweeps rotate every off-diagonal pair until
/// the off-diagonal Frobenius norm drops below 1e-13 * max(1, ||H||_F) or
/// 100 sweeps have run. Deterministic for a fixed input.
inline EigenDecomposition eigendecompose(const SymmetricMatrix& m) {
    const std::size_t n = m.dim();
    std::vector<double> a(m.data().begin(), m.data().end());
    std::vector<double> q(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) q[i * n + i] = 1.0;

    const double stop = 1e-13 * std::max(1.0, m.frobenius_norm());
    for (int sweep = 0; sweep < 100 && n > 1; ++sweep) {
        if (detail::off_diagonal_frobenius(a, n) <= stop) break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t r = p + 1; r < n; ++r) {
                const double apr = a[p * n + r];
                if (apr == 0.0) continue;
                const double app = a[p * n + p];
                const double arr = a[r * n + r];
                const double theta = (arr - app) / (2.0 * apr);
                const double t =
                    (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                a[p * n + p] = app - t * apr;
                a[r * n + r] = arr + t * apr;
                a[p * n + r] = 0.0;
                a[r * n + p] = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k != p && k != r) {
                        const double akp = a[k * n + p];
                        const double akr = a[k * n + r];
                        a[k * n + p] = c * akp - s * akr;
                        a[p * n + k] = a[k * n + p];
                        a[k * n + r] = s * akp + c * akr;
                        a[r * n + k] = a[k * n + r];
                    }
                    const double qkp = q[k * n + p];
                    const double qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i * n + i] > a[j * n + j]; });

    EigenDecomposition out;
    out.dim = n;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        out.eigenvalues[k] = a[order[k] * n + order[k]];
        for (std::size_t i = 0; i < n; ++i) out.eigenvectors[i * n + k] = q[i * n + order[k]];
    }
    return out;
}

/// Minimum eigenvalue check with a scale-aware tolerance.
inline bool is_positive_semidefinite(const SymmetricMatrix& m,
                                     double tolerance_scale = 1e-9) {
    const EigenDecomposition e = eigendecompose(m);
    return e.eigenvalues.back() >= -tolerance_scale * std::max(1.0, m.frobenius_norm());
}

} // namespace convexity
