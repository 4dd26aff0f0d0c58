#pragma once

#include <stdexcept>
#include <string>

namespace weakmix {

/// Input that violates a documented precondition (bad simplex, angle out of
/// range, sample too small for a proper posterior, ...).
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

/// A numerical procedure could not produce a trustworthy value.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace weakmix
