#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

// Input that violates a type invariant or a config schema. The CLI maps this
// to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    explicit ValidationError(const std::string& message, std::string field = {})
        : std::invalid_argument(message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Valid input for which the requested quantity does not exist (anti-spring
// regime, unreachable target, turning-point calibration, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Filesystem or record-format failures.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace optomech
