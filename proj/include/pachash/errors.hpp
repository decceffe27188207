#pragma once

#include <stdexcept>
#include <string>

namespace pachash {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char *code() const noexcept { return "error"; }
};

/// A caller broke a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
    const char *code() const noexcept override { return "invalid-argument"; }
};

/// Stored bytes do not follow the on-disk format (bad magic, bad table, ...).
class FormatError : public Error {
public:
    using Error::Error;
    const char *code() const noexcept override { return "format"; }
};

/// Stored data is well-formed but contradicts a store invariant.
class IntegrityError : public Error {
public:
    using Error::Error;
    const char *code() const noexcept override { return "integrity"; }
};

class IoError : public Error {
public:
    using Error::Error;
    const char *code() const noexcept override { return "io"; }
};

}  // namespace pachash
