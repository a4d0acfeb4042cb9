// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace convexity {

/// Input violates a documented precondition (bad matrix data, unknown
/// builtin name, parameter out of range).
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Expression source text could not be parsed. `offset` is the byte
/// position of the first offending character.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// An evaluation produced a non-finite value or left the function's domain.
class eval_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A finite-difference stencil or integration region left the field's domain.
class boundary_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace convexity
