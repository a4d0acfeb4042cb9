// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "convexity/canonical.hpp"
#include "convexity/psd_distance.hpp"
#include "convexity/rng.hpp"

namespace convexity {

struct VerifyOptions {
    int trials = 100;
    std::uint64_t seed = 42;
    std::size_t dim = 2;
    OracleBudget budget{};
};

struct VerifyReport {
    int oracle_trials = 0;
    int oracle_pass = 0;
    double oracle_worst_gap = 0.0;  // max |oracle - lops| over trials
    int trace_trials = 0;
    int trace_pass = 0;

    bool all_pass() const {
        return oracle_pass == oracle_trials && trace_pass == trace_trials;
    }
};

namespace detail {

inline SymmetricMatrix random_symmetric(std::size_t dim, Rng& rng) {
    std::vector<double> raw(dim * dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i; j < dim; ++j) {
            raw[i * dim + j] = rng.uniform(-1.0, 1.0);
            raw[j * dim + i] = raw[i * dim + j];
        }
    return SymmetricMatrix(dim, raw);
}

inline SymmetricMatrix random_gram(std::size_t dim, Rng& rng) {
    std::vector<double> a(dim * dim);
    for (double& v : a) v = rng.uniform(-1.0, 1.0);
    std::vector<double> raw(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < dim; ++k) s += a[k * dim + i] * a[k * dim + j];
            raw[i * dim + j] = s;
        }
    return SymmetricMatrix(dim, raw);
}

} // namespace detail

/// Randomized check that the direct PSD-distance search never beats the
/// negative-part nuclear norm. Tolerance band: the search may fall short of
/// the true minimum by up to 1e-3 (finite sampling) but may not undercut
/// ||H^-||_* by more than 1e-12.
inline bool oracle_equivalence_trial(const SymmetricMatrix& m, const OracleBudget& budget,
                                     double* gap_out = nullptr) {
    const double lops = psd_indices(m).lops;
    const double dist = nuclear_distance_to_psd_oracle(m, budget);
    if (gap_out) *gap_out = std::abs(dist - lops);
    return dist >= lops - 1e-3 && dist <= lops + 1e-12;
}

/// Randomized trial suites behind the `verify` command: the distance-oracle
/// equivalence and the trace bound on random PSD pairs.
inline VerifyReport run_verification(const VerifyOptions& opt) {
    if (opt.dim < 2 || opt.dim > 3)
        throw precondition_error("verification supports dim in {2, 3}");
    if (opt.trials < 1) throw precondition_error("verification needs trials >= 1");

    VerifyReport report;
    Rng rng(opt.seed);

    report.oracle_trials = opt.trials;
    for (int t = 0; t < opt.trials; ++t) {
        const SymmetricMatrix m = detail::random_symmetric(opt.dim, rng);
        OracleBudget budget = opt.budget;
        budget.seed = rng.next_bits();
        double gap = 0.0;
        if (oracle_equivalence_trial(m, budget, &gap)) ++report.oracle_pass;
        report.oracle_worst_gap = std::max(report.oracle_worst_gap, gap);
    }

    report.trace_trials = opt.trials;
    for (int t = 0; t < opt.trials; ++t) {
        const SymmetricMatrix h1 = detail::random_gram(opt.dim, rng);
        const SymmetricMatrix h2 = detail::random_gram(opt.dim, rng);
        if (trace_bound_check(h1, h2)) ++report.trace_pass;
    }

    return report;
}

} // namespace convexity
