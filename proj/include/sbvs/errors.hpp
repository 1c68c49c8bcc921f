#pragma once

#include <stdexcept>
#include <string>

namespace sbvs {

/// Base for every error raised by the library. Each subclass names one
/// failure category so callers (and the CLI) can react without string
/// matching.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SizeLimitError : public Error {
public:
    using Error::Error;
};

class ShapeError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class SequencingError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sbvs
