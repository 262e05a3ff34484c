#pragma once

#include <stdexcept>
#include <string>

namespace sdfl {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or command usage (CLI exit code 1).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Violated operation precondition (invalid size, budget, unstable queue, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// File system failure (CLI exit code 3).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace sdfl
