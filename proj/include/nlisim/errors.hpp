#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace nlisim {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (non-positive length, empty grid, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A wavelength or frequency fell outside the domain where a model is valid.
class RangeError : public Error {
public:
    using Error::Error;
};

/// The state carries no probability (all-zero amplitude).
class DegenerateStateError : public Error {
public:
    using Error::Error;
};

/// An input did not satisfy a documented contract (e.g. unnormalized state).
class ContractError : public Error {
public:
    using Error::Error;
};

/// A numerical kernel failed to converge or produced non-finite output.
class NumericError : public Error {
public:
    using Error::Error;
};

/// A configuration file could not be read or contained a bad value.
class ConfigError : public Error {
public:
    ConfigError(std::string key, const std::string& what)
        : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

} // namespace nlisim
