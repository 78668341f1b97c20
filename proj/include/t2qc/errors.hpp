#pragma once

#include <stdexcept>
#include <string>

namespace t2qc {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed external input (CSV rows, config files, date strings).
struct ParseError : Error {
    using Error::Error;
};

/// Contract violations on otherwise well-formed data: unknown sign names,
/// duplicate cells, dimension mismatches.
struct DataError : Error {
    using Error::Error;
};

/// Too little data to estimate from (e.g. fewer complete cases than the
/// estimator needs). Kept distinct from DataError so callers can separate
/// "fix the file" from "collect more data".
struct InsufficientDataError : DataError {
    using DataError::DataError;
};

/// Numerical failure: singular or ill-conditioned matrices, degenerate
/// scales, Cholesky breakdown.
struct NumericError : Error {
    using Error::Error;
};

}  // namespace t2qc
