// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "convexity/errors.hpp"

namespace convexity {

/// Dense real symmetric matrix, row-major storage.
///
/// Construction symmetrizes: the stored matrix is (A + A^T)/2 of whatever
/// raw data is supplied, so entries(i,j) == entries(j,i) holds exactly.
/// Instances are immutable values and safe to share across threads.
class SymmetricMatrix {
public:
    explicit SymmetricMatrix(std::size_t dim) : dim_(dim), a_(dim * dim, 0.0) {
        if (dim < 1) throw precondition_error("matrix dimension must be >= 1");
    }

    SymmetricMatrix(std::size_t dim, std::span<const double> row_major)
        : dim_(dim), a_(dim * dim) {
        if (dim < 1) throw precondition_error("matrix dimension must be >= 1");
        if (row_major.size() != dim * dim)
            throw precondition_error("matrix data size does not match dimension");
        for (std::size_t i = 0; i < dim; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                const double v = 0.5 * (row_major[i * dim + j] + row_major[j * dim + i]);
                if (!std::isfinite(v))
                    throw precondition_error("matrix entry not finite at (" +
                                             std::to_string(i) + "," + std::to_string(j) + ")");
                a_[i * dim + j] = v;
            }
        }
    }

    static SymmetricMatrix diagonal(std::span<const double> d) {
        SymmetricMatrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (!std::isfinite(d[i]))
                throw precondition_error("diagonal entry not finite at " + std::to_string(i));
            m.a_[i * d.size() + i] = d[i];
        }
        return m;
    }

    static SymmetricMatrix identity(std::size_t dim) {
        SymmetricMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.a_[i * dim + i] = 1.0;
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }

    double operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

    std::span<const double> data() const noexcept { return a_; }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += a_[i * dim_ + i];
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : a_) s += v * v;
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : a_) m = std::max(m, std::abs(v));
        return m;
    }

    double max_abs_diff(const SymmetricMatrix& other) const {
        if (other.dim_ != dim_)
            throw precondition_error("dimension mismatch in matrix comparison");
        double m = 0.0;
        for (std::size_t k = 0; k < a_.size(); ++k)
            m = std::max(m, std::abs(a_[k] - other.a_[k]));
        return m;
    }

    SymmetricMatrix operator+(const SymmetricMatrix& other) const {
        return combine(other, +1.0);
    }

    SymmetricMatrix operator-(const SymmetricMatrix& other) const {
        return combine(other, -1.0);
    }

    SymmetricMatrix operator*(double factor) const {
        SymmetricMatrix r(dim_);
        for (std::size_t k = 0; k < a_.size(); ++k) {
            const double v = a_[k] * factor;
            if (!std::isfinite(v)) throw precondition_error("matrix scaling overflowed");
            r.a_[k] = v;
        }
        return r;
    }

private:
    SymmetricMatrix combine(const SymmetricMatrix& other, double sign) const {
        if (other.dim_ != dim_)
            throw precondition_error("dimension mismatch in matrix arithmetic");
        SymmetricMatrix r(dim_);
        for (std::size_t k = 0; k < a_.size(); ++k) r.a_[k] = a_[k] + sign * other.a_[k];
        return r;
    }

    std::size_t dim_;
    std::vector<double> a_;
};

inline SymmetricMatrix operator*(double factor, const SymmetricMatrix& m) {
    return m * factor;
}

} // namespace convexity
