#pragma once

#include <stdexcept>
#include <string>

namespace asian {

/// Invalid scenario, schedule or solver configuration.
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input that is well formed but outside the contract of an approximation
/// (e.g. a non-equidistant schedule handed to Curran's formula).
class OutOfContractError : public ConfigError {
public:
    explicit OutOfContractError(const std::string& what) : ConfigError(what) {}
};

/// Breakdown inside a numerical kernel (singular pivot, non-finite values).
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Two independent pricing routes disagree beyond tolerance.
class CorroborationError : public std::runtime_error {
public:
    explicit CorroborationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace asian
