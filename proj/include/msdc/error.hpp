#pragma once

#include <stdexcept>
#include <string>

namespace msdc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes that do not line up: pattern vs geometry, weight matrix vs geometry.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// An input pattern that violates the fixed-S contract or pixel range.
class PatternError : public Error {
public:
    using Error::Error;
};

/// Invalid geometry or parameter configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

class UnsupportedOperation : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace msdc
