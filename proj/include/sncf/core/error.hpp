#pragma once

#include <stdexcept>
#include <string>

namespace sncf {

enum class ErrorKind { Config, Load, Numerical };

/// Base of every error raised by the library. The kind selects the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Invalid parameters, infeasible requests, malformed configuration.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Unreadable or malformed input files.
class LoadError : public Error {
public:
    explicit LoadError(const std::string& what) : Error(ErrorKind::Load, what) {}
};

/// Non-convergence, non-finite intermediate values.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace sncf
