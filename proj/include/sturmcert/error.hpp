#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sturmcert {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid model parameters (e.g. Gamma <= 0 for the boundary coefficients).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Inputs outside an operation's domain: empty ranges, negative states, u not in the cone.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Non-finite value produced while evaluating a user function.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// Cone interval [a,b] violates the separated-BC admissibility inequalities.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// No piece of a nonlinearity claims the queried point.
class CoverageError : public Error {
public:
    using Error::Error;
};

/// Integrals that must be strictly positive came out zero.
class DegenerateError : public Error {
public:
    using Error::Error;
};

/// Missing or inconsistent configuration data.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0)
        : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

/// Fixed-point iteration left the admissible ball; carries the norm history.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::vector<double> trace)
        : Error(what), trace_(std::move(trace)) {}

    const std::vector<double>& trace() const noexcept { return trace_; }

private:
    std::vector<double> trace_;
};

}  // namespace sturmcert
