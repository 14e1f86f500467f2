#pragma once

#include <stdexcept>
#include <string>

namespace uavcomp {

// Invalid argument for a mathematical function (pole, non-finite input, bad domain).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A numerical routine could not reach its stated accuracy.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration problem. `key` names the offending setting when known.
struct ConfigError : std::invalid_argument {
    ConfigError(std::string key_, const std::string& what)
        : std::invalid_argument(key_.empty() ? what : key_ + ": " + what), key(std::move(key_)) {}
    std::string key;
};

struct DegenerateInputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InsufficientDeploymentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// L + B singular or otherwise unusable communication graph.
struct GraphConfigurationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A standing modelling assumption (positive definiteness, positivity of a vector) does not hold.
struct AssumptionViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameters fall outside the validity region of a closed-form expression.
struct ConditionError : std::domain_error {
    using std::domain_error::domain_error;
};

}  // namespace uavcomp
