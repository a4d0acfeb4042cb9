// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "convexity/canonical.hpp"
#include "convexity/rng.hpp"
#include "convexity/spectral.hpp"
#include "convexity/symmetric_matrix.hpp"

namespace convexity {

/// Search effort for the brute-force nuclear-distance oracle.
struct OracleBudget {
    int grid_steps = 50;          // per-axis steps of the 2x2 PSD grid
    int grid_steps_3d = 12;       // per-axis steps of the 3x3 eigenbasis grid
    int random_candidates = 200;  // random PSD perturbations of the plus part
    int refine_rounds = 60;       // local refinement proposals around the best
    std::uint64_t seed = 0x1c0ffee;
};

namespace detail {

inline double nuclear_norm_2x2(double a, double b, double c) {
    const double mean = 0.5 * (a + c);
    const double radius = std::sqrt(0.25 * (a - c) * (a - c) + b * b);
    return std::abs(mean + radius) + std::abs(mean - radius);
}

/// PSD candidate near `base`: perturb symmetrically, then keep the positive
/// part of the perturbed matrix (always PSD).
inline SymmetricMatrix random_psd_near(const SymmetricMatrix& base, double sigma, Rng& rng) {
    const std::size_t n = base.dim();
    std::vector<double> raw(base.data().begin(), base.data().end());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double d = sigma * rng.uniform(-1.0, 1.0);
            raw[i * n + j] += d;
            raw[j * n + i] = raw[i * n + j];
        }
    }
    return canonical_split(SymmetricMatrix(n, raw)).plus;
}

} // namespace detail

/// Direct search for inf over PSD matrices M of ||H - M||_*.
///
/// Candidates: the positive part H^+ (always included), a dense grid over a
/// PSD parameterization ([[a,b],[b,c]] with a,c >= 0 and b^2 <= ac for 2x2,
/// a nonnegative-diagonal grid in H's eigenbasis for 3x3), and random PSD
/// perturbations of H^+ with local refinement. Supports dim <= 3 only; the
/// search is exhaustive by design, not fast.
inline double nuclear_distance_to_psd_oracle(const SymmetricMatrix& m,
                                             const OracleBudget& budget = {}) {
    const std::size_t n = m.dim();
    if (n > 3)
        throw precondition_error("nuclear_distance_to_psd_oracle supports dim <= 3, got dim = " +
                                 std::to_string(n));

    const SymmetricMatrix plus = canonical_split(m).plus;
    SymmetricMatrix best = plus;
    double best_dist = nuclear_norm(m - plus);

    const double scale = m.frobenius_norm();
    Rng rng(budget.seed);

    if (n == 1) {
        const double h = m(0, 0);
        for (int i = 0; i <= budget.grid_steps; ++i) {
            const double a = 2.0 * std::max(scale, 1e-30) * i / budget.grid_steps;
            const double d = std::abs(h - a);
            if (d < best_dist) best_dist = d;
        }
    } else if (n == 2) {
        const double h00 = m(0, 0), h01 = m(0, 1), h11 = m(1, 1);
        const double hi = 2.0 * scale;
        const int steps = budget.grid_steps;
        for (int ia = 0; ia <= steps; ++ia) {
            const double a = hi * ia / steps;
            for (int ic = 0; ic <= steps; ++ic) {
                const double c = hi * ic / steps;
                const double bmax = std::sqrt(a * c);
                for (int ib = 0; ib <= steps; ++ib) {
                    const double b = bmax == 0.0 ? 0.0 : -bmax + 2.0 * bmax * ib / steps;
                    const double d = detail::nuclear_norm_2x2(h00 - a, h01 - b, h11 - c);
                    if (d < best_dist) {
                        best_dist = d;
                        best = SymmetricMatrix(2, std::vector<double>{a, b, b, c});
                    }
                    if (bmax == 0.0) break;
                }
            }
        }
    } else {
        // Nonnegative diagonals in H's own eigenbasis; the minimizer is known
        // to live there, the grid exists to contradict that if the split is wrong.
        const EigenDecomposition e = eigendecompose(m);
        const double hi = 2.0 * scale;
        const int steps = budget.grid_steps_3d;
        std::vector<double> diag(3);
        for (int i0 = 0; i0 <= steps; ++i0) {
            diag[0] = hi * i0 / steps;
            for (int i1 = 0; i1 <= steps; ++i1) {
                diag[1] = hi * i1 / steps;
                for (int i2 = 0; i2 <= steps; ++i2) {
                    diag[2] = hi * i2 / steps;
                    const SymmetricMatrix cand = e.reassemble(diag);
                    const double d = nuclear_norm(m - cand);
                    if (d < best_dist) {
                        best_dist = d;
                        best = cand;
                    }
                }
            }
        }
    }

    for (int k = 0; k < budget.random_candidates; ++k) {
        const double sigma = std::max(scale, 1e-12) * rng.uniform(0.0, 1.0);
        const SymmetricMatrix cand = detail::random_psd_near(plus, sigma, rng);
        const double d = nuclear_norm(m - cand);
        if (d < best_dist) {
            best_dist = d;
            best = cand;
        }
    }

    for (int r = 0; r < budget.refine_rounds; ++r) {
        const double sigma = std::max(scale, 1e-12) * 0.5 * std::pow(0.85, r);
        const SymmetricMatrix cand = detail::random_psd_near(best, sigma, rng);
        const double d = nuclear_norm(m - cand);
        if (d < best_dist) {
            best_dist = d;
            best = cand;
        }
    }

    return best_dist;
}

} // namespace convexity
