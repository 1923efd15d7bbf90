#pragma once

#include <stdexcept>
#include <string>

namespace bloch {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input outside an operation's mathematical domain (|I| > 1, negative variance, ...).
struct DomainError : Error {
    using Error::Error;
};

struct NormalizationError : DomainError {
    using DomainError::DomainError;
};

// A physical state left the admissible region, e.g. |I(t)| > 1 on the dissipative qubit.
struct RangeError : Error {
    using Error::Error;
};

// Coupling beyond the Ohmic renormalization bound gamma*pi/(2*epsilon) <= 1.
struct ValidityError : Error {
    using Error::Error;
};

struct NumericalError : Error {
    using Error::Error;
};

} // namespace bloch
