#pragma once

#include <stdexcept>
#include <string>

namespace mgan {

// Shape/argument violations inside the numeric core.
class ShapeError : public std::invalid_argument {
public:
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// Bad configuration values or unknown config keys. CLI maps this to exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite values where finite ones are required (NaN gradients, debug checks).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem and decode/encode failures. CLI maps this to exit 3.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mgan
