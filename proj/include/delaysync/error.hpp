#pragma once

#include <stdexcept>
#include <string>

namespace dsync {

/// Base of every error the library throws. `exit_code()` is what the CLI
/// returns when the error reaches `main`.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

/// Malformed arguments, configs or files.
class InvalidInput : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// A mathematical precondition of the requested analysis does not hold
/// (unstable equilibrium, disconnected network, kappa outside the window...).
class PreconditionError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// Argument outside the domain of a closed-form law.
class DomainError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// The numerics could not deliver a trustworthy answer.
class NumericalError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

}  // namespace dsync
