#pragma once

#include <stdexcept>
#include <string>

namespace gwgb {

// Malformed or inconsistent input data (CSV contents, fold files, labels).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Unreadable, incompatible or inconsistent model files.
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid parameters (out-of-range config values, bad protocol settings).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace gwgb
