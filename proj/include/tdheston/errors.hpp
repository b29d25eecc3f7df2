#pragma once

#include <stdexcept>
#include <string>

namespace tdheston {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model parameter or argument is outside its domain.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A closed-form intermediate became singular or non-finite.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// A requested time lies beyond the last period of a term structure.
class HorizonError : public Error {
public:
    using Error::Error;
};

/// The transform integral did not converge; carries the partial estimate.
class QuadratureError : public Error {
public:
    QuadratureError(const std::string& what, double partial)
        : Error(what), partial_(partial) {}
    double partial_estimate() const noexcept { return partial_; }

private:
    double partial_;
};

/// The forward used to normalise a tilted measure vanished.
class DegenerateForwardError : public Error {
public:
    using Error::Error;
};

/// Implied volatility inversion has no solution for the given price.
class NoSolutionError : public Error {
public:
    using Error::Error;
};

/// Market data is inconsistent (e.g. a tenor without forward).
class DataError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; message carries line/column.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace tdheston
