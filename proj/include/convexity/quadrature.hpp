// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "convexity/errors.hpp"
#include "convexity/hessian.hpp"
#include "convexity/indices.hpp"
#include "convexity/scalar_field.hpp"

namespace convexity {

/// Square S_{x0,y0}(a) = (x0 - a, x0 + a) x (y0 - a, y0 + a).
struct Square {
    double x0 = 0.0;
    double y0 = 0.0;
    double half_width = 1.0;

    HyperRect rect() const {
        if (!(half_width > 0.0)) throw precondition_error("square half-width must be positive");
        return HyperRect({x0 - half_width, y0 - half_width}, {x0 + half_width, y0 + half_width});
    }
};

struct GlobalIndex {
    double value = 1.0;
    bool degenerate = false;
    double degenerate_fraction = 0.0;
};

struct SweepRecord {
    double a = 0.0;
    double conv = 1.0;
    double degenerate_fraction = 0.0;
};

/// Global index evaluated over the expanding squares S_center(a).
struct SweepResult {
    double x0 = 0.0;
    double y0 = 0.0;
    int nodes_per_axis = 0;
    std::vector<SweepRecord> records;
};

/// Row-major lattice of pointwise reports (axis 0 slowest).
struct RegionMap {
    std::vector<double> lo;
    std::vector<double> hi;
    int nodes_per_axis = 0;
    std::vector<ConvexityReport> reports;
};

namespace detail {

/// Runs fn(begin, end) over a partition of [0, count); exceptions from
/// workers are captured and rethrown on the calling thread.
template <typename Fn>
inline void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    unsigned n = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(count, 1)));
    if (n <= 1) {
        fn(std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::size_t chunk = (count + n - 1) / n;
    for (unsigned t = 0; t < n; ++t) {
        const std::size_t begin = t * chunk;
        const std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

inline std::vector<double> simpson_weights(double lo, double hi, int nodes) {
    const double h = (hi - lo) / (nodes - 1);
    std::vector<double> w(nodes, 0.0);
    for (int k = 0; k < nodes; ++k)
        w[k] = (k == 0 || k == nodes - 1) ? h / 3.0 : (k % 2 == 1 ? 4.0 * h / 3.0 : 2.0 * h / 3.0);
    return w;
}

inline void decode_lattice_index(std::size_t flat, int nodes, std::size_t dim,
                                 std::span<std::size_t> digits) {
    for (std::size_t ax = dim; ax-- > 0;) {
        digits[ax] = flat % nodes;
        flat /= nodes;
    }
}

inline void require_region_inside_hint(const ScalarField& f, const HyperRect& region,
                                       const FdConfig& cfg) {
    if (region.dim() != f.dimension())
        throw precondition_error("region dimension does not match field dimension");
    if (!f.domain_hint()) return;
    const HyperRect& hint = *f.domain_hint();
    for (std::size_t i = 0; i < region.dim(); ++i) {
        if (region.lo[i] - fd_step(cfg, region.lo[i]) < hint.lo[i] ||
            region.hi[i] + fd_step(cfg, region.hi[i]) > hint.hi[i])
            throw boundary_error(
                "region is not inside the field's domain once shrunk by one FD step (axis " +
                std::to_string(i) + ")");
    }
}

inline std::size_t checked_lattice_size(int nodes, std::size_t dim) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) {
        if (total > (std::size_t{1} << 27) / static_cast<std::size_t>(nodes))
            throw precondition_error("lattice is too large; lower the per-axis node count");
        total *= static_cast<std::size_t>(nodes);
    }
    return total;
}

} // namespace detail

/// L1 global convexity index over a box: the ratio of the integrals of
/// sum(lambda_i^+) and sum|lambda_i|, both by tensor-product composite
/// Simpson over one shared lattice of Hessian eigenvalue evaluations.
/// Degenerate lattice points (zero Hessian) contribute nothing to either
/// integral; a region whose denominator vanishes is flagged degenerate with
/// value 1.
inline GlobalIndex global_convexity_index(const ScalarField& f, const HyperRect& region,
                                          int nodes_per_axis, const FdConfig& cfg = {},
                                          unsigned threads = 0) {
    validate_fd_config(cfg);
    if (nodes_per_axis < 3 || nodes_per_axis % 2 == 0)
        throw precondition_error("nodes per axis must be odd and >= 3");
    detail::require_region_inside_hint(f, region, cfg);

    const std::size_t d = region.dim();
    const std::size_t total = detail::checked_lattice_size(nodes_per_axis, d);
    std::vector<std::vector<double>> axis_weights(d);
    for (std::size_t i = 0; i < d; ++i)
        axis_weights[i] = detail::simpson_weights(region.lo[i], region.hi[i], nodes_per_axis);

    std::vector<double> sum_plus(total), sum_abs(total);
    detail::parallel_for(total, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> digits(d);
        std::vector<double> point(d);
        for (std::size_t k = begin; k < end; ++k) {
            detail::decode_lattice_index(k, nodes_per_axis, d, digits);
            for (std::size_t ax = 0; ax < d; ++ax) {
                const double h = (region.hi[ax] - region.lo[ax]) / (nodes_per_axis - 1);
                point[ax] = region.lo[ax] + static_cast<double>(digits[ax]) * h;
            }
            const EigenDecomposition e = eigendecompose(hessian_fd(f, point, cfg));
            double plus = 0.0, abs_sum = 0.0;
            for (double lambda : e.eigenvalues) {
                plus += std::max(lambda, 0.0);
                abs_sum += std::abs(lambda);
            }
            sum_plus[k] = plus;
            sum_abs[k] = abs_sum;
        }
    });

    // reduction stays in lattice order so results are bit-stable across
    // thread counts
    double numerator = 0.0, denominator = 0.0;
    std::size_t degenerate_count = 0;
    std::vector<std::size_t> digits(d);
    for (std::size_t k = 0; k < total; ++k) {
        detail::decode_lattice_index(k, nodes_per_axis, d, digits);
        double w = 1.0;
        for (std::size_t ax = 0; ax < d; ++ax) w *= axis_weights[ax][digits[ax]];
        numerator += w * sum_plus[k];
        denominator += w * sum_abs[k];
        if (sum_abs[k] == 0.0) ++degenerate_count;
    }

    GlobalIndex out;
    out.degenerate_fraction = static_cast<double>(degenerate_count) / static_cast<double>(total);
    if (denominator < 1e-14 * region.volume()) {
        out.value = 1.0;
        out.degenerate = true;
        return out;
    }
    out.value = numerator / denominator;
    out.degenerate = false;
    return out;
}

/// CONV(a) over the squares S_center(a), a = a_max * k / steps, k = 1..steps.
inline SweepResult sweep_conv_a(const ScalarField& f, double x0, double y0, double a_max,
                                int steps, int nodes_per_axis, const FdConfig& cfg = {},
                                unsigned threads = 0) {
    if (f.dimension() != 2) throw precondition_error("sweep_conv_a needs a two-dimensional field");
    if (!(a_max > 0.0)) throw precondition_error("sweep needs a positive maximal half-width");
    if (steps < 1) throw precondition_error("sweep needs at least one step");

    std::vector<double> half_widths(steps);
    for (int k = 1; k <= steps; ++k) half_widths[k - 1] = a_max * k / steps;
    for (double a : half_widths) {
        try {
            detail::require_region_inside_hint(f, Square{x0, y0, a}.rect(), cfg);
        } catch (const boundary_error&) {
            throw boundary_error("square escapes the field's domain first at a = " +
                                 std::to_string(a));
        }
    }

    SweepResult result;
    result.x0 = x0;
    result.y0 = y0;
    result.nodes_per_axis = nodes_per_axis;
    result.records.reserve(half_widths.size());
    for (double a : half_widths) {
        const GlobalIndex g =
            global_convexity_index(f, Square{x0, y0, a}.rect(), nodes_per_axis, cfg, threads);
        result.records.push_back(SweepRecord{a, g.value, g.degenerate_fraction});
    }
    return result;
}

/// Pointwise reports over the full node lattice of a box.
inline RegionMap region_map(const ScalarField& f, const HyperRect& region, int nodes_per_axis,
                            const FdConfig& cfg = {}, unsigned threads = 0) {
    validate_fd_config(cfg);
    if (nodes_per_axis < 2) throw precondition_error("region map needs at least 2 nodes per axis");
    detail::require_region_inside_hint(f, region, cfg);

    const std::size_t d = region.dim();
    const std::size_t total = detail::checked_lattice_size(nodes_per_axis, d);
    RegionMap map;
    map.lo = region.lo;
    map.hi = region.hi;
    map.nodes_per_axis = nodes_per_axis;
    map.reports.resize(total);
    detail::parallel_for(total, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::size_t> digits(d);
        std::vector<double> point(d);
        for (std::size_t k = begin; k < end; ++k) {
            detail::decode_lattice_index(k, nodes_per_axis, d, digits);
            for (std::size_t ax = 0; ax < d; ++ax) {
                const double h = (region.hi[ax] - region.lo[ax]) / (nodes_per_axis - 1);
                point[ax] = region.lo[ax] + static_cast<double>(digits[ax]) * h;
            }
            map.reports[k] = pointwise_indices(f, point, cfg);
        }
    });
    return map;
}

} // namespace convexity
