#pragma once

#include <stdexcept>
#include <string>

namespace simaudit {

// Bad input data, schema violations, bad config values. CLI maps this to exit 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Inputs are well-formed but an audit cannot run on them
// (e.g. missing reference group). CLI maps this to exit 3.
class InfeasibleError : public std::runtime_error {
public:
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace simaudit
