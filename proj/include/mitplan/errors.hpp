#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mitplan {

// Base of all library failures. `code()` is the short machine-parseable tag
// the CLI prints on exit (one word, stable across releases).
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& what)
        : std::runtime_error(what), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

// Malformed input document (bad JSON, missing field, wrong shape).
struct ParseError : Error {
    explicit ParseError(const std::string& w) : Error("parse", w) {}
};

// Well-formed input violating a documented invariant (range, duplicate, sum).
struct ValidationError : Error {
    explicit ValidationError(const std::string& w) : Error("validation", w) {}
};

// Bad runtime configuration (missing table entry, zero order, empty list).
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config", w) {}
};

// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error("domain", w) {}
};

// Operation invoked in a state that does not admit it (e.g. step after done).
struct StateError : Error {
    explicit StateError(const std::string& w) : Error("state", w) {}
};

// Portfolio or plan exceeding its budget.
struct FeasibilityError : Error {
    explicit FeasibilityError(const std::string& w) : Error("feasibility", w) {}
};

// Filesystem trouble (unreadable path, write failure).
struct IoError : Error {
    explicit IoError(const std::string& w) : Error("io", w) {}
};

}  // namespace mitplan
