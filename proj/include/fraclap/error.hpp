#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used in the CLI's error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class InvalidDomain : public Error {
public:
    explicit InvalidDomain(const std::string& message) : Error("invalid-domain", message) {}
};

class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& message) : Error("invalid-argument", message) {}
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, double residual)
        : Error("non-convergence", message), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class NonFiniteValue : public Error {
public:
    explicit NonFiniteValue(const std::string& message) : Error("non-finite", message) {}
};

/// Schema violation in a run configuration; `pointer()` is a JSON pointer to
/// the offending value.
class ConfigError : public Error {
public:
    ConfigError(std::string pointer, const std::string& message)
        : Error("config", (pointer.empty() ? std::string("/") : pointer) + ": " + message),
          pointer_(std::move(pointer)) {}

    const std::string& pointer() const noexcept { return pointer_; }

private:
    std::string pointer_;
};

class IoError : public Error {
public:
    explicit IoError(const std::string& message) : Error("io", message) {}
};

} // namespace fraclap
