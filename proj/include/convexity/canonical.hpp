// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "convexity/spectral.hpp"
#include "convexity/symmetric_matrix.hpp"

namespace convexity {

/// H = plus - minus with plus/minus assembled from the positive/negative
/// eigenvalue parts in H's own eigenbasis. Both parts are positive
/// semidefinite and the nuclear norms split additively:
/// nuclear_total == nuclear_plus + nuclear_minus.
struct CanonicalSplit {
    SymmetricMatrix plus;
    SymmetricMatrix minus;
    double nuclear_plus = 0.0;
    double nuclear_minus = 0.0;
    double nuclear_total = 0.0;
};

/// Matrix-level positive-semidefiniteness indices.
///
/// lops = ||H^-||_*, nlops = lops / ||H||_*, ps = ||H^+||_* / ||H||_*.
/// A matrix with zero nuclear norm is flagged degenerate and reported as
/// lops = 0, nlops = 0, ps = 1 (a zero matrix is positive semidefinite).
struct PsdIndexReport {
    double lops = 0.0;
    double nlops = 0.0;
    double ps = 1.0;
    bool degenerate = false;
};

namespace detail {

/// Shared index arithmetic for matrix- and Hessian-level reports.
/// `zero_tol` coarsens: eigenvalues with |lambda| <= zero_tol count as zero.
/// The default 0 keeps the exact max(-lambda, 0) semantics.
struct EigenvalueParts {
    double sum_plus = 0.0;
    double sum_minus = 0.0;
    double sum_abs = 0.0;
};

inline EigenvalueParts eigenvalue_parts(std::span<const double> eigenvalues,
                                        double zero_tol = 0.0) {
    EigenvalueParts p;
    for (double lambda : eigenvalues) {
        if (std::abs(lambda) <= zero_tol) lambda = 0.0;
        p.sum_plus += std::max(lambda, 0.0);
        p.sum_minus += std::max(-lambda, 0.0);
        p.sum_abs += std::abs(lambda);
    }
    return p;
}

} // namespace detail

inline CanonicalSplit canonical_split(const SymmetricMatrix& m, double zero_tol = 0.0) {
    const EigenDecomposition e = eigendecompose(m);
    const std::size_t n = m.dim();
    std::vector<double> plus_diag(n), minus_diag(n);
    for (std::size_t k = 0; k < n; ++k) {
        double lambda = e.eigenvalues[k];
        if (std::abs(lambda) <= zero_tol) lambda = 0.0;
        plus_diag[k] = std::max(lambda, 0.0);
        minus_diag[k] = std::max(-lambda, 0.0);
    }
    const detail::EigenvalueParts p = detail::eigenvalue_parts(e.eigenvalues, zero_tol);
    return CanonicalSplit{e.reassemble(plus_diag), e.reassemble(minus_diag),
                          p.sum_plus, p.sum_minus, p.sum_abs};
}

/// Sum of absolute eigenvalues (trace norm).
inline double nuclear_norm(const SymmetricMatrix& m) {
    return detail::eigenvalue_parts(eigendecompose(m).eigenvalues).sum_abs;
}

inline PsdIndexReport psd_indices_from_eigenvalues(std::span<const double> eigenvalues,
                                                   double zero_tol = 0.0) {
    const detail::EigenvalueParts p = detail::eigenvalue_parts(eigenvalues, zero_tol);
    if (p.sum_abs == 0.0) return PsdIndexReport{0.0, 0.0, 1.0, true};
    return PsdIndexReport{p.sum_minus, p.sum_minus / p.sum_abs, p.sum_plus / p.sum_abs, false};
}

inline PsdIndexReport psd_indices(const SymmetricMatrix& m, double zero_tol = 0.0) {
    return psd_indices_from_eigenvalues(eigendecompose(m).eigenvalues, zero_tol);
}

/// Minimality check behind the canonical decomposition: for positive
/// semidefinite h1, h2 and H = h1 - h2, the positive part can never carry
/// more trace than h1, nor the negative part more than h2.
inline bool trace_bound_check(const SymmetricMatrix& h1, const SymmetricMatrix& h2) {
    if (h1.dim() != h2.dim())
        throw precondition_error("trace_bound_check: dimension mismatch");
    if (!is_positive_semidefinite(h1))
        throw precondition_error("trace_bound_check: first argument is not positive semidefinite");
    if (!is_positive_semidefinite(h2))
        throw precondition_error("trace_bound_check: second argument is not positive semidefinite");
    const detail::EigenvalueParts p =
        detail::eigenvalue_parts(eigendecompose(h1 - h2).eigenvalues);
    return p.sum_plus <= h1.trace() + 1e-9 && p.sum_minus <= h2.trace() + 1e-9;
}

} // namespace convexity
