#pragma once

#include <stdexcept>
#include <string>

namespace pdq {

/// Base class for all library errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

/// Malformed input file or stream. Carries the 1-based line number when known.
class parse_error : public error {
public:
    explicit parse_error(const std::string& msg, long line = -1)
        : error(line >= 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
    long line() const noexcept { return line_; }
    const char* kind() const noexcept override { return "parse_error"; }

private:
    long line_;
};

/// Well-formed input that violates a domain invariant (e.g. death < birth).
class validation_error : public error {
public:
    using error::error;
    const char* kind() const noexcept override { return "validation_error"; }
};

/// Out-of-range argument (q < 1, radius <= 0, shots == 0, ...).
class parameter_error : public error {
public:
    using error::error;
    const char* kind() const noexcept override { return "parameter_error"; }
};

/// Problem size exceeds a configured cap (qubit count, point-cloud size).
class capacity_error : public error {
public:
    using error::error;
    const char* kind() const noexcept override { return "capacity_error"; }
};

/// No feasible solution exists (e.g. an all-forbidden assignment row).
class infeasible_error : public error {
public:
    using error::error;
    const char* kind() const noexcept override { return "infeasible_error"; }
};

/// File or stream could not be opened or written.
class io_error : public error {
public:
    using error::error;
    const char* kind() const noexcept override { return "io_error"; }
};

} // namespace pdq
