#pragma once

#include <stdexcept>
#include <string>

namespace semkg {

// Base class for all toolkit errors. Subclasses map onto CLI exit codes,
// see tools/semkg_main.cpp.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input data (bad triple file, bad JSON, bad pair record).
class ParseError : public Error {
public:
    ParseError(const std::string& msg, long line = -1)
        : Error(line >= 0 ? msg + " (line " + std::to_string(line) + ")" : msg),
          line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

// A requested operation has no eligible move (e.g. no removable node).
// Callers are expected to catch this and fall back to another subgraph.
class InfeasibleError : public Error {
public:
    using Error::Error;
};

// Network / backend transport failure; retryable.
class TransportError : public Error {
public:
    using Error::Error;
};

// Invalid configuration or arguments.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Filesystem failure.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace semkg
