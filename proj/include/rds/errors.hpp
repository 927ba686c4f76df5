#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rds {

/// Bad input: malformed config, violated precondition, inconsistent files.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The numerics broke down (escape, degenerate polynomial, empty support).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OrbitEscaped : public NumericalError {
public:
    OrbitEscaped(std::size_t index, double value)
        : NumericalError("orbit escaped at index " + std::to_string(index) + " (|x| = " +
                         std::to_string(value) + ")"),
          index_(index) {}
    std::size_t index() const { return index_; }

private:
    std::size_t index_;
};

}  // namespace rds
