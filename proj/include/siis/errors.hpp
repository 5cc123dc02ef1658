#pragma once

#include <stdexcept>
#include <string>

namespace siis {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad inputs: out-of-range parameters, shape mismatches, malformed configs.
class InvalidParameterError : public Error {
public:
    using Error::Error;
};

/// A given label falls outside {1..c}.
class InvalidLabelError : public InvalidParameterError {
public:
    using InvalidParameterError::InvalidParameterError;
};

/// Graph cannot support the requested operation (e.g. empty edge set).
class DegenerateGraphError : public InvalidParameterError {
public:
    using InvalidParameterError::InvalidParameterError;
};

/// Numerical failure: singular or ill-conditioned system, residual blow-up.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Iterative eigensolver did not converge within its budget.
class EigensolverError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// File-system and parsing failures.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace siis
