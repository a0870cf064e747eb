#pragma once

#include <stdexcept>
#include <string>

namespace sim {

// Bad configuration, schema violation, or precondition failure. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A dispersive denominator (Delta_0 + Delta_j or Delta_1 + Delta_j - delta_j) hit zero.
class SingularDetuningError : public ConfigError {
public:
    explicit SingularDetuningError(const std::string& what) : ConfigError(what) {}
};

// Adaptive integration could not proceed. CLI exit code 3.
class IntegrationError : public std::runtime_error {
public:
    IntegrationError(const std::string& what, double failureTime)
        : std::runtime_error(what), failureTime_(failureTime) {}
    double failureTime() const { return failureTime_; }

private:
    double failureTime_;
};

} // namespace sim
