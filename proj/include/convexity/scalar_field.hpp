// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "convexity/errors.hpp"
#include "convexity/expression.hpp"

namespace convexity {

/// Axis-aligned box, the only domain shape supported for regions and hints.
struct HyperRect {
    std::vector<double> lo;
    std::vector<double> hi;

    HyperRect(std::vector<double> lo_in, std::vector<double> hi_in)
        : lo(std::move(lo_in)), hi(std::move(hi_in)) {
        if (lo.size() != hi.size() || lo.empty())
            throw precondition_error("hyperrectangle bounds must be non-empty and equal-sized");
        for (std::size_t i = 0; i < lo.size(); ++i) {
            if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i]))
                throw precondition_error("hyperrectangle needs lo[i] < hi[i] with finite bounds");
        }
    }

    std::size_t dim() const noexcept { return lo.size(); }

    bool contains(std::span<const double> p, double margin = 0.0) const {
        if (p.size() != lo.size()) return false;
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (p[i] < lo[i] + margin || p[i] > hi[i] - margin) return false;
        return true;
    }

    double volume() const {
        double v = 1.0;
        for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
        return v;
    }
};

inline std::string format_point(std::span<const double> p) {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (i) os << ", ";
        os << p[i];
    }
    os << ')';
    return os.str();
}

/// Evaluatable function R^d -> R with optional domain metadata.
///
/// Fields are immutable values: the evaluator must be pure, so copies of a
/// field may be evaluated concurrently from any number of threads.
class ScalarField {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    ScalarField(std::size_t dimension, Evaluator fn,
                std::optional<HyperRect> domain_hint = std::nullopt, std::string name = "")
        : dim_(dimension), fn_(std::move(fn)), hint_(std::move(domain_hint)),
          name_(std::move(name)) {
        if (dim_ < 1) throw precondition_error("scalar field dimension must be >= 1");
        if (hint_ && hint_->dim() != dim_)
            throw precondition_error("domain hint dimension does not match field dimension");
    }

    std::size_t dimension() const noexcept { return dim_; }
    const std::optional<HyperRect>& domain_hint() const noexcept { return hint_; }
    const std::string& name() const noexcept { return name_; }

    double evaluate(std::span<const double> point) const {
        if (point.size() != dim_)
            throw precondition_error("point dimension mismatch: expected " + std::to_string(dim_) +
                                     ", got " + std::to_string(point.size()));
        const double v = fn_(point);
        if (!std::isfinite(v))
            throw eval_error("field" + (name_.empty() ? "" : " '" + name_ + "'") +
                             " evaluated to a non-finite value at " + format_point(point));
        return v;
    }

    double operator()(std::initializer_list<double> point) const {
        return evaluate(std::span<const double>(point.begin(), point.size()));
    }

private:
    std::size_t dim_;
    Evaluator fn_;
    std::optional<HyperRect> hint_;
    std::string name_;
};

inline ScalarField from_expression(std::string_view source, std::size_t dimension,
                                   std::optional<HyperRect> domain_hint = std::nullopt) {
    Expression expr = parse_expression(source, dimension);
    std::string name = expr.to_string();
    return ScalarField(
        dimension,
        [expr = std::move(expr)](std::span<const double> p) { return expr.evaluate(p); },
        std::move(domain_hint), std::move(name));
}

inline ScalarField negated(const ScalarField& f) {
    return ScalarField(
        f.dimension(), [f](std::span<const double> p) { return -f.evaluate(p); },
        f.domain_hint(), f.name().empty() ? "" : "-(" + f.name() + ")");
}

inline ScalarField scaled(const ScalarField& f, double factor) {
    if (!std::isfinite(factor)) throw precondition_error("scale factor must be finite");
    return ScalarField(
        f.dimension(), [f, factor](std::span<const double> p) { return factor * f.evaluate(p); },
        f.domain_hint(), f.name());
}

} // namespace convexity
