#pragma once

#include <stdexcept>
#include <string>

namespace lifshitz {

// Bad arguments, violated preconditions, inconsistent configuration.
struct UsageError : std::invalid_argument {
    explicit UsageError(const std::string& what) : std::invalid_argument(what) {}
};

// Quadrature or eigensolver failed to reach its tolerance.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace lifshitz
