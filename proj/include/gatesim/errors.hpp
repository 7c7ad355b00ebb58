#pragma once

#include <stdexcept>
#include <string>

namespace gatesim {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Violated mathematical precondition, e.g. a zero-norm embedding.
class DomainError : public Error {
public:
    using Error::Error;
};

// Invalid caller-supplied values (out-of-range rates, malformed traces).
class ValidationError : public Error {
public:
    using Error::Error;
};

// Missing or inconsistent configuration, e.g. no owner database for a face stage.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Structured-text input that cannot be decoded.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace gatesim
