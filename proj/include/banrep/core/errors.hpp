#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace banrep {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Two objects that must agree in size do not.
class DimensionError : public Error {
 public:
    DimensionError(const std::string& what, std::size_t expected, std::size_t actual)
        : Error(what + ": expected size " + std::to_string(expected) + ", got " + std::to_string(actual)),
          expected_(expected),
          actual_(actual) {}

    std::size_t expected() const noexcept { return expected_; }
    std::size_t actual() const noexcept { return actual_; }

 private:
    std::size_t expected_;
    std::size_t actual_;
};

/// Input violates a documented precondition.
class ValidationError : public Error {
 public:
    using Error::Error;
};

/// The exponent lies outside the range where the requested map is single-valued or defined.
class UnsupportedExponent : public ValidationError {
 public:
    explicit UnsupportedExponent(double p)
        : ValidationError("unsupported exponent p = " + std::to_string(p)), p_(p) {}
    double p() const noexcept { return p_; }

 private:
    double p_;
};

/// Two sites coincide within the merge tolerance.
class DuplicateSite : public ValidationError {
 public:
    DuplicateSite(std::size_t first, std::size_t second)
        : ValidationError("duplicate sites " + std::to_string(first) + " and " + std::to_string(second)),
          first_(first),
          second_(second) {}
    std::size_t first() const noexcept { return first_; }
    std::size_t second() const noexcept { return second_; }

 private:
    std::size_t first_;
    std::size_t second_;
};

/// A regularization operator fails the admissibility requirement (smooth, slowly growing).
class AdmissibilityError : public ValidationError {
 public:
    using ValidationError::ValidationError;
};

/// A solver could not reach its stated tolerance, or a factorization broke down.
class NumericError : public Error {
 public:
    using Error::Error;
};

}  // namespace banrep
