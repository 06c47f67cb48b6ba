// errors.hpp — exception types shared by every module.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace gaudin {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

// Two level coordinates closer than the collision tolerance.
class DegenerateLevelError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class DomainError : public Error {
public:
    using Error::Error;
};

// Quantity requested at xi = 0 that only exists as a limit.
class ContractionLimitError : public Error {
public:
    using Error::Error;
};

// A residual or matrix entry hit a vanishing Gaudin denominator. The pair
// names the colliding coordinates: level indices are non-negative,
// rapidity indices are encoded as -(alpha + 1).
class SingularEvaluationError : public Error {
public:
    SingularEvaluationError(const std::string& what, int first, int second)
        : Error(what), pair_(first, second) {}
    std::pair<int, int> offending_pair() const noexcept { return pair_; }

private:
    std::pair<int, int> pair_;
};

class InsufficientModesError : public Error {
public:
    using Error::Error;
};

class SelectionError : public Error {
public:
    using Error::Error;
};

class SingularJacobianError : public Error {
public:
    using Error::Error;
};

class RepresentationError : public Error {
public:
    using Error::Error;
};

class CutoffError : public Error {
public:
    using Error::Error;
};

class BasisMismatchError : public Error {
public:
    using Error::Error;
};

class ContractError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace gaudin
