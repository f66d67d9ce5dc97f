#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sfeeg {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Dimension mismatch between tensors/layers.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Operation called in an invalid order (e.g. backward without a cached forward).
class StateError : public Error {
public:
    using Error::Error;
};

// Non-finite values where finite ones are required.
class NumericError : public Error {
public:
    using Error::Error;
};

// Invalid argument or configuration value.
class ValueError : public Error {
public:
    using Error::Error;
};

// File-level I/O failure.
class IoError : public Error {
public:
    using Error::Error;
};

// Malformed checkpoint/state container (bad magic, version, truncation).
class CheckpointError : public IoError {
public:
    using IoError::IoError;
};

// Text format violation; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line)
        : Error(msg + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

} // namespace sfeeg
