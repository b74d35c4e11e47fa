#pragma once

#include <stdexcept>
#include <string>

namespace avgcase {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A caller-supplied value is outside the documented domain
/// (bad shape parameter, negative edge, empty sample list, ...).
class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& msg) : Error(msg) {}
};

/// The requested combination is recognized but intentionally not provided
/// (e.g. a closed form that only exists for a parameter subfamily).
class UnsupportedError : public Error {
public:
    explicit UnsupportedError(const std::string& msg) : Error(msg) {}
};

/// A three-term recurrence hit a zero denominator while producing
/// coefficients of the given degree.
class SingularCoefficientError : public Error {
public:
    SingularCoefficientError(const std::string& msg, int degree_)
        : Error(msg), degree(degree_) {}
    int degree;
};

/// A polynomial family lost its defining property (normalization or
/// orthogonality) at the given degree beyond repairable roundoff.
class DegeneracyError : public Error {
public:
    DegeneracyError(const std::string& msg, int degree_)
        : Error(msg), degree(degree_) {}
    int degree;
};

/// An iterative run blew up; `last_finite_t` is the last iteration whose
/// metrics were still finite.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& msg, int last_finite_t_)
        : Error(msg), last_finite_t(last_finite_t_) {}
    int last_finite_t;
};

/// A numerical result failed its built-in self-check (e.g. a quadrature
/// value that does not stabilize under node doubling).
class PrecisionError : public Error {
public:
    explicit PrecisionError(const std::string& msg) : Error(msg) {}
};

/// A configuration file is malformed: unknown key, wrong type, missing
/// required field, or an inconsistent combination.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// A file could not be read or written.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

} // namespace avgcase
