#pragma once

#include <stdexcept>
#include <string>

namespace urp {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed or incomplete input data (CSV, schema, column invariants).
class DataError : public Error {
public:
    using Error::Error;
};

// Too few observations for the requested operation.
class InsufficientData : public Error {
public:
    using Error::Error;
};

// The regressor is constant, so a linear model cannot be identified.
class DegenerateRegressor : public Error {
public:
    using Error::Error;
};

// A split variable carries no association structure (constant column,
// single bin, no admissible split point).
class DegenerateColumn : public Error {
public:
    using Error::Error;
};

// A combination of options that is deliberately not supported.
class UnsupportedConfiguration : public Error {
public:
    using Error::Error;
};

} // namespace urp
