#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace lqc {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

inline constexpr const char* kVersion = "0.3.1";

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Value outside the range of an invertible special function.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Violated precondition on structured input (grid shapes, field bounds, ...).
class PreconditionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure finished without meeting its acceptance test.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lqc
