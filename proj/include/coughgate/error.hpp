#pragma once

#include <stdexcept>
#include <string>

namespace coughgate {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file (CSV row, WAV chunk layout). Message names the location.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input violates a documented contract (unknown label token, dimension mismatch, non-finite value).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// File codec or sample format outside the supported set.
class UnsupportedFormatError : public Error {
public:
    using Error::Error;
};

/// Filesystem or stream failure, including truncated payloads.
class IoError : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration (bad hyperparameter, filterbank too dense, axis/classifier mismatch).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Numerical failure that survived the documented recovery path (e.g. covariance not PD after jitter).
class NumericError : public Error {
public:
    using Error::Error;
};

/// Training cannot proceed on the given data (single-class input, too few samples).
class TrainingError : public Error {
public:
    using Error::Error;
};

} // namespace coughgate
