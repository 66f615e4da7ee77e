#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dfbm {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A model parameter is outside its domain (H not in (0,1), theta <= 0, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Observation times are not strictly increasing, or the grid is too short.
class GridError : public Error {
public:
    using Error::Error;
};

/// Covariance factorization failed even after the maximal diagonal jitter.
class ConditioningError : public Error {
public:
    using Error::Error;
};

/// A transform would overflow double precision at a given observation.
class RangeError : public Error {
public:
    RangeError(const std::string& what, std::size_t index)
        : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

/// Moment estimation or regression could not be carried out.
class EstimationError : public Error {
public:
    using Error::Error;
};

/// Malformed input file.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace dfbm
