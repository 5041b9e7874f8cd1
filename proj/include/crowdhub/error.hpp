#pragma once

#include <stdexcept>
#include <string>

namespace crowdhub {

// Base for all errors raised by the library. `kind()` is a stable short tag
// used by the CLI for machine-readable error lines.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what) : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error("parse", what) {}
};

class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("validation", what) {}
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& what) : Error("usage", what) {}
};

}  // namespace crowdhub
