// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "convexity/errors.hpp"
#include "convexity/risk.hpp"
#include "convexity/scalar_field.hpp"
#include "convexity/symmetric_matrix.hpp"

namespace convexity {

/// Parameters for the built-in corpus. Only h_beta and g_risk consume them;
/// defaults reproduce the reference surface (uniform losses, p = 0.99,
/// alpha = 1/4, two equally weighted lines).
struct BuiltinParams {
    std::optional<double> beta;
    double p = 0.99;
    double alpha = 0.25;
    std::vector<double> weights = {0.5, 0.5};
    double domain_floor = 1e-4;
};

namespace detail {

inline double g_line_loss(double z, double p, double alpha) {
    LineSpec line;
    line.p = p;
    line.alpha = alpha;
    return line_total_loss(line, z);
}

} // namespace detail

inline const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"h_cos", "g_risk", "h_beta", "cubic_1d",
                                                   "neg_cos_1d"};
    return names;
}

/// Built-in corpus:
///   h_cos       -cos(x) - cos(y) on R^2
///   g_risk      one-line total loss g(z) = ES(z) + (1-p) z^alpha, z in (0,1)
///   h_beta      weighted generalized mean of two g lines (needs beta)
///   cubic_1d    x^3
///   neg_cos_1d  -cos(x)
inline ScalarField builtin(std::string_view name, const BuiltinParams& params = {}) {
    if (name == "h_cos") {
        return ScalarField(
            2, [](std::span<const double> p) { return -std::cos(p[0]) - std::cos(p[1]); },
            std::nullopt, "h_cos");
    }
    if (name == "cubic_1d") {
        return ScalarField(
            1, [](std::span<const double> p) { return p[0] * p[0] * p[0]; }, std::nullopt,
            "cubic_1d");
    }
    if (name == "neg_cos_1d") {
        return ScalarField(
            1, [](std::span<const double> p) { return -std::cos(p[0]); }, std::nullopt,
            "neg_cos_1d");
    }
    if (name == "g_risk") {
        const double p = params.p;
        const double alpha = params.alpha;
        if (!(p > 0.0) || !(p < 1.0)) throw precondition_error("g_risk needs p in (0, 1)");
        if (!(alpha > 0.0)) throw precondition_error("g_risk needs alpha > 0");
        const double lo = params.domain_floor;
        HyperRect hint(std::vector<double>{lo}, std::vector<double>{1.0 - lo});
        return ScalarField(
            1,
            [p, alpha](std::span<const double> z) { return detail::g_line_loss(z[0], p, alpha); },
            std::move(hint), "g_risk");
    }
    if (name == "h_beta") {
        if (!params.beta)
            throw precondition_error("h_beta requires a beta parameter");
        AggregateSpec spec;
        spec.weights = params.weights;
        spec.beta = *params.beta;
        spec.domain_floor = params.domain_floor;
        LineSpec line;
        line.p = params.p;
        line.alpha = params.alpha;
        spec.lines.assign(params.weights.size(), line);
        return aggregate_field(spec);
    }
    throw precondition_error("unknown builtin '" + std::string(name) +
                             "' (expected h_cos, g_risk, h_beta, cubic_1d or neg_cos_1d)");
}

inline bool has_analytic_hessian(std::string_view name) {
    return name == "h_cos" || name == "g_risk" || name == "cubic_1d" || name == "neg_cos_1d";
}

/// Closed-form Hessians of the corpus functions (default parameters for
/// g_risk). h_beta has no registered closed form.
inline SymmetricMatrix analytic_hessian(std::string_view name, std::span<const double> point) {
    if (name == "h_cos") {
        if (point.size() != 2) throw precondition_error("h_cos is two-dimensional");
        const double d[] = {std::cos(point[0]), std::cos(point[1])};
        return SymmetricMatrix::diagonal(d);
    }
    if (name == "cubic_1d") {
        if (point.size() != 1) throw precondition_error("cubic_1d is one-dimensional");
        const double d[] = {6.0 * point[0]};
        return SymmetricMatrix::diagonal(d);
    }
    if (name == "neg_cos_1d") {
        if (point.size() != 1) throw precondition_error("neg_cos_1d is one-dimensional");
        const double d[] = {std::cos(point[0])};
        return SymmetricMatrix::diagonal(d);
    }
    if (name == "g_risk") {
        if (point.size() != 1) throw precondition_error("g_risk is one-dimensional");
        const double z = point[0];
        if (!(z > 0.0)) throw precondition_error("g_risk second derivative needs z > 0");
        // g(z) = (1-z)^2/2 + 0.01 z^(1/4) on (0,1]; the shortfall term vanishes past 1
        const double shortfall_part = z < 1.0 ? 1.0 : 0.0;
        const double d[] = {shortfall_part + 0.01 * 0.25 * (0.25 - 1.0) * std::pow(z, 0.25 - 2.0)};
        return SymmetricMatrix::diagonal(d);
    }
    throw precondition_error("no closed-form Hessian registered for '" + std::string(name) + "'");
}

} // namespace convexity
