#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sgn {

/// Bad arguments to a constructor or operation (sizes, orders, ranges).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The model state violates a physical precondition, e.g. h <= 0.
class StateError : public std::runtime_error {
public:
    StateError(const std::string& what, std::size_t node)
        : std::runtime_error(what), node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

/// A linear solve or other numerical kernel broke down.
class NumericalFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Configuration parsing/validation failure (CLI exit code 1).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace sgn
