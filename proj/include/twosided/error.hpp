#pragma once

#include <stdexcept>
#include <string>

namespace twosided {

// Root of the library's exception hierarchy. Callers that only care about
// "something in the analysis failed" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid numeric parameters (design sizes, probabilities, k, alpha, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

// Matrix / vector dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

// Malformed input file. Row and column are 1-based; 0 means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row = 0, std::size_t column = 0)
        : Error(what), row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

// Incoherent test configuration (e.g. permutation resampling requested for a
// non-exchangeable design).
class ConfigError : public Error {
public:
    using Error::Error;
};

// A conditioning event cannot be formed from the observed assignment.
class DegenerateEventError : public Error {
public:
    using Error::Error;
};

// A statistic's treated or control arm is empty.
class DegenerateArmError : public Error {
public:
    using Error::Error;
};

// Studentization needs at least two units per arm.
class VarianceUndefinedError : public Error {
public:
    using Error::Error;
};

// Studentization denominator is zero.
class ZeroVarianceError : public Error {
public:
    using Error::Error;
};

// Rejection sampler gave up.
class SamplerExhaustedError : public Error {
public:
    SamplerExhaustedError(const std::string& what, long long tries, long long accepted)
        : Error(what), tries_(tries), accepted_(accepted) {}
    long long tries() const noexcept { return tries_; }
    long long accepted() const noexcept { return accepted_; }

private:
    long long tries_;
    long long accepted_;
};

}  // namespace twosided
