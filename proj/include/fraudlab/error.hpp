#pragma once

#include <stdexcept>
#include <string>

namespace fraudlab {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// CSV header does not match the expected column list.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A cell could not be parsed (non-numeric, non-finite, truncated row).
class ParseError : public Error {
public:
    using Error::Error;
};

/// A value violates a documented contract (label outside {0,1}, bad fraction, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A resampling plan cannot be satisfied with the data at hand.
class InfeasiblePlanError : public Error {
public:
    using Error::Error;
};

/// A training row reached an evaluation set, or a scaler was fit outside training data.
class LeakageError : public Error {
public:
    using Error::Error;
};

// Process exit codes used by the CLI.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 2,
    exit_data = 3,
    exit_infeasible = 4,
    exit_internal = 5,
};

} // namespace fraudlab
