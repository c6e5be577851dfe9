#pragma once

#include <stdexcept>
#include <string>

namespace rsma_isac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, parameter value or file contents.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numerical operation has no well-defined result for the given inputs
/// (degenerate direction, rank-deficient channel matrix, zero information).
class NumericError : public Error {
public:
    using Error::Error;
};

class DegenerateDirectionError : public NumericError {
public:
    using NumericError::NumericError;
};

class RankDeficientError : public NumericError {
public:
    using NumericError::NumericError;
};

class ZeroInformationError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace rsma_isac
