// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "convexity/errors.hpp"
#include "convexity/scalar_field.hpp"

namespace convexity {

/// Threshold below which the generalized mean switches to its geometric
/// (beta -> 0) closed form.
inline constexpr double kGeometricMeanBetaEpsilon = 1e-9;

/// Loss distribution with a known cdf: the uniform on [0,1] in closed form,
/// or a tabulated piecewise-linear cdf (repeated abscissae encode jumps).
class LossDistribution {
public:
    static LossDistribution uniform01() { return LossDistribution(); }

    static LossDistribution from_table(std::vector<double> points, std::vector<double> cdf) {
        if (points.size() != cdf.size() || points.size() < 2)
            throw precondition_error("cdf table needs >= 2 equal-length columns");
        for (std::size_t k = 0; k < points.size(); ++k) {
            if (!std::isfinite(points[k]) || !std::isfinite(cdf[k]))
                throw precondition_error("cdf table entries must be finite");
            if (k > 0 && (points[k] < points[k - 1] || cdf[k] < cdf[k - 1]))
                throw precondition_error("cdf table must be non-decreasing in both columns");
        }
        if (std::abs(cdf.front()) > 1e-12 || std::abs(cdf.back() - 1.0) > 1e-12)
            throw precondition_error("cdf table must start at 0 and end at 1");
        cdf.front() = 0.0;
        cdf.back() = 1.0;
        LossDistribution d;
        d.kind_ = Kind::table;
        d.t_ = std::move(points);
        d.f_ = std::move(cdf);
        return d;
    }

    bool is_uniform01() const noexcept { return kind_ == Kind::uniform01; }

    std::pair<double, double> support() const {
        if (kind_ == Kind::uniform01) return {0.0, 1.0};
        return {t_.front(), t_.back()};
    }

    double cdf(double t) const {
        if (kind_ == Kind::uniform01) return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
        if (t < t_.front()) return 0.0;
        if (t >= t_.back()) return 1.0;
        for (std::size_t k = 0; k + 1 < t_.size(); ++k) {
            if (t >= t_[k + 1]) continue;  // reaching k means t >= t_[k]
            return f_[k] + (f_[k + 1] - f_[k]) * (t - t_[k]) / (t_[k + 1] - t_[k]);
        }
        return 1.0;
    }

    /// E[(X - x)_+] = integral over (x, inf) of 1 - F.
    double expected_shortfall(double x) const {
        if (!std::isfinite(x)) throw precondition_error("shortfall threshold must be finite");
        if (kind_ == Kind::uniform01) {
            if (x >= 1.0) return 0.0;
            if (x <= 0.0) return 0.5 - x;
            return 0.5 * (1.0 - x) * (1.0 - x);
        }
        if (x >= t_.back()) return 0.0;
        double total = 0.0;
        double start = x;
        if (x < t_.front()) {
            total += t_.front() - x;  // F = 0 left of the table
            start = t_.front();
        }
        for (std::size_t k = 0; k + 1 < t_.size(); ++k) {
            const double a = t_[k], b = t_[k + 1];
            if (b <= start || a == b) continue;
            const double lo = std::max(a, start);
            const double flo = f_[k] + (f_[k + 1] - f_[k]) * (lo - a) / (b - a);
            total += 0.5 * ((1.0 - flo) + (1.0 - f_[k + 1])) * (b - lo);
        }
        return total;
    }

    /// inf{ x : F(x) >= p }.
    double value_at_risk(double p) const {
        require_quantile(p);
        if (kind_ == Kind::uniform01) return p;
        if (p <= f_.front()) return t_.front();
        for (std::size_t k = 0; k + 1 < t_.size(); ++k) {
            if (f_[k + 1] < p) continue;  // reaching k means f_[k] < p <= f_[k+1]
            if (t_[k + 1] == t_[k]) return t_[k];  // jump crossing p: left endpoint
            return t_[k] + (p - f_[k]) * (t_[k + 1] - t_[k]) / (f_[k + 1] - f_[k]);
        }
        return t_.back();
    }

    /// (1/(1-p)) * integral over (p, 1) of VaR_u.
    double average_value_at_risk(double p) const {
        require_quantile(p);
        if (kind_ == Kind::uniform01) return 0.5 * (1.0 + p);
        double integral = 0.0;
        for (std::size_t k = 0; k + 1 < t_.size(); ++k) {
            if (f_[k + 1] <= p || f_[k + 1] == f_[k]) continue;
            const double ulo = std::max(f_[k], p);
            const double uhi = f_[k + 1];
            const double qlo =
                t_[k] + (ulo - f_[k]) * (t_[k + 1] - t_[k]) / (f_[k + 1] - f_[k]);
            integral += 0.5 * (qlo + t_[k + 1]) * (uhi - ulo);
        }
        return integral / (1.0 - p);
    }

private:
    enum class Kind { uniform01, table };

    static void require_quantile(double p) {
        if (!(p > 0.0) || !(p < 1.0))
            throw precondition_error("quantile level must lie in (0, 1)");
    }

    Kind kind_ = Kind::uniform01;
    std::vector<double> t_;
    std::vector<double> f_;
};

enum class PenaltyKind { linear, power };

/// One business line: loss distribution, quantile level of the penalty rate,
/// and the shape of the capital penalty.
struct LineSpec {
    LossDistribution distribution = LossDistribution::uniform01();
    double p = 0.99;
    double alpha = 0.25;
    PenaltyKind penalty = PenaltyKind::power;
};

inline void validate_line(const LineSpec& spec) {
    if (!(spec.p > 0.0) || !(spec.p < 1.0))
        throw precondition_error("line quantile p must lie in (0, 1)");
    if (!(spec.alpha > 0.0)) throw precondition_error("line alpha must be positive");
}

/// Total loss of one line at capital x: expected shortfall plus the
/// penalty (1-p)*x or (1-p)*x^alpha.
inline double line_total_loss(const LineSpec& spec, double x) {
    validate_line(spec);
    double penalty;
    if (spec.penalty == PenaltyKind::linear) {
        penalty = (1.0 - spec.p) * x;
    } else {
        if (x < 0.0)
            throw eval_error("power penalty undefined for negative capital x = " +
                             std::to_string(x));
        penalty = (1.0 - spec.p) * std::pow(x, spec.alpha);
    }
    return spec.distribution.expected_shortfall(x) + penalty;
}

/// (sum w_i v_i^beta)^(1/beta), with the geometric closed form
/// exp(sum w_i ln v_i) once |beta| < kGeometricMeanBetaEpsilon.
inline double generalized_mean(std::span<const double> values, std::span<const double> weights,
                               double beta) {
    if (values.empty() || values.size() != weights.size())
        throw precondition_error("generalized mean needs equal-length, non-empty inputs");
    if (!std::isfinite(beta)) throw precondition_error("beta must be finite");
    double wsum = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw precondition_error("weights must be non-negative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw precondition_error("weights must sum to 1 within 1e-12");

    const bool geometric = std::abs(beta) < kGeometricMeanBetaEpsilon;
    const bool needs_positive = geometric || beta <= 0.0 || beta != std::floor(beta);
    double acc = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        if (needs_positive && !(v > 0.0))
            throw eval_error("generalized mean needs positive values for beta = " +
                             std::to_string(beta));
        acc += weights[i] * (geometric ? std::log(v) : std::pow(v, beta));
    }
    const double result = geometric ? std::exp(acc) : std::pow(acc, 1.0 / beta);
    if (!std::isfinite(result)) throw eval_error("generalized mean is not finite");
    return result;
}

/// Company-level aggregate: weighted generalized mean of per-line losses.
struct AggregateSpec {
    std::vector<LineSpec> lines;
    std::vector<double> weights;
    double beta = 1.0;
    double domain_floor = 1e-4;  // keeps power penalties away from the x = 0 singularity
};

inline void validate_aggregate(const AggregateSpec& spec) {
    if (spec.lines.empty()) throw precondition_error("aggregate needs at least one line");
    if (spec.weights.size() != spec.lines.size())
        throw precondition_error("aggregate weights must match the number of lines");
    double wsum = 0.0;
    for (double w : spec.weights) {
        if (!(w >= 0.0)) throw precondition_error("weights must be non-negative");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw precondition_error("weights must sum to 1 within 1e-12");
    if (!std::isfinite(spec.beta)) throw precondition_error("beta must be finite");
    if (!(spec.domain_floor > 0.0) || !(spec.domain_floor < 0.5))
        throw precondition_error("domain floor must lie in (0, 0.5)");
    for (const LineSpec& line : spec.lines) validate_line(line);
}

/// Field x -> generalized_mean(h_i(x_i), w, beta) on [floor, 1-floor]^d.
inline ScalarField aggregate_field(const AggregateSpec& spec) {
    validate_aggregate(spec);
    const std::size_t d = spec.lines.size();
    const double lo = spec.domain_floor;
    HyperRect hint(std::vector<double>(d, lo), std::vector<double>(d, 1.0 - lo));

    const bool geometric = std::abs(spec.beta) < kGeometricMeanBetaEpsilon;
    const bool needs_positive =
        geometric || spec.beta <= 0.0 || spec.beta != std::floor(spec.beta);
    auto eval = [spec, geometric, needs_positive](std::span<const double> x) {
        double acc = 0.0;
        for (std::size_t i = 0; i < spec.lines.size(); ++i) {
            const double v = line_total_loss(spec.lines[i], x[i]);
            if (needs_positive && !(v > 0.0))
                throw eval_error("aggregate needs positive line losses at " + format_point(x));
            acc += spec.weights[i] * (geometric ? std::log(v) : std::pow(v, spec.beta));
        }
        return geometric ? std::exp(acc) : std::pow(acc, 1.0 / spec.beta);
    };
    return ScalarField(d, std::move(eval), std::move(hint),
                       "h_beta(beta=" + std::to_string(spec.beta) + ")");
}

} // namespace convexity
