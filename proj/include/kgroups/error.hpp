#pragma once

#include <stdexcept>
#include <string>

namespace kgroups {

/// Base of every error the library throws. `exit_code()` is the process
/// status the CLI reports for the error category.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual int exit_code() const noexcept { return 1; }
};

/// Caller supplied something outside an operation's precondition.
class InputError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

/// A relocation that would leave a cluster empty (or undersized for an
/// m-point move).
class RejectedMove : public InputError {
public:
    using InputError::InputError;
};

/// Malformed dataset file: wrong shape, bad token, checksum mismatch.
class IngestionError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 3; }
};

/// A numeric identity the library relies on was observed broken.
class InvariantViolation : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 4; }
};

/// Filesystem failure while writing outputs.
class IoError : public Error {
public:
    using Error::Error;
    int exit_code() const noexcept override { return 2; }
};

}  // namespace kgroups
