#pragma once

#include <stdexcept>
#include <string>

namespace renewal {

/// Argument outside the mathematical domain of an operation (t < 0, beta <= 0, u not in (0,1), ...).
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Solver or grid configuration that cannot be honoured (knots off the grid, step too coarse, ...).
class ConfigError : public std::invalid_argument {
public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// Malformed textual input; the message names the offending line.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace renewal
