#pragma once

#include <stdexcept>
#include <string>

namespace llmnav {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Caller broke an operation's precondition (bad start cell, NaN command, empty path).
class InputError : public Error {
public:
    using Error::Error;
};

/// Position or cell outside the map.
class RangeError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration / documents.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Scenario document failed to parse or broke an invariant. `field()` names the culprit.
class ScenarioError : public ConfigError {
public:
    ScenarioError(std::string field, const std::string& what)
        : ConfigError(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Lookup of an unknown identifier (robot id, tool name).
class LookupError : public Error {
public:
    using Error::Error;
};

/// LLM backend could not produce a completion.
class TransportError : public Error {
public:
    using Error::Error;
};

}  // namespace llmnav
