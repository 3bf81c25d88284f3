#pragma once

#include <stdexcept>
#include <string>

namespace osmoguard {

// Bad argument to an operation (shape mismatch, out-of-range index, empty input).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Invalid configuration value. key() names the offending field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// Operation invoked on an object that is not in a usable state.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace osmoguard
