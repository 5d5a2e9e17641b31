#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace singmech {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `position` is 1-based; end of input is size()+1.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t position, const std::string& message)
        : Error("syntax error at position " + std::to_string(position) + ": " + message),
          position_(position), detail_(message) {}
    [[nodiscard]] std::size_t position() const noexcept { return position_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t position_;
    std::string detail_;
};

class UnknownSymbol : public Error {
public:
    explicit UnknownSymbol(std::string name)
        : Error("unknown symbol '" + name + "'"), name_(std::move(name)) {}
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

class UnboundSymbol : public Error {
public:
    explicit UnboundSymbol(std::string name)
        : Error("unbound symbol '" + name + "'"), name_(std::move(name)) {}
    [[nodiscard]] const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

/// log of a non-positive value, division by zero.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Lagrangian outside the supported class (velocity dependence beyond quadratic).
class UnsupportedLagrangian : public Error {
public:
    using Error::Error;
};

/// Rank (or the feasible pivot set) changes between sampled states.
class NonConstantRank : public Error {
public:
    using Error::Error;
};

class SingularMinor : public Error {
public:
    using Error::Error;
};

/// A Hamiltonian still depends on a noncanonical velocity.
class NondynamicalViolation : public Error {
public:
    NondynamicalViolation(const std::string& message, std::string offending)
        : Error(message), offending_(std::move(offending)) {}
    [[nodiscard]] const std::string& offending() const noexcept { return offending_; }

private:
    std::string offending_;
};

class InconsistentSystem : public Error {
public:
    using Error::Error;
};

class NoOracle : public Error {
public:
    using Error::Error;
};

class SecondClassRequired : public Error {
public:
    using Error::Error;
};

class CorrespondenceFailure : public Error {
public:
    using Error::Error;
};

/// Model or input file could not be read.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Model file is well-formed but semantically invalid.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Caller violated an operation's precondition (bad step size, short path...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

}  // namespace singmech
