#pragma once

#include <stdexcept>
#include <string>

namespace seqdiag {

enum class ErrorKind {
    Schema,       // malformed document, missing or mistyped field
    Validation,   // value violates a model invariant
    Permutation,  // strategy is not a permutation of the symptom's components
    NotFound,     // unknown symptom / component / session / expert
    Conflict,     // operation not allowed in the current state
    Domain,       // numeric precondition violated (e.g. zero probability mass)
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure raised by the library. `path` locates the offending element
// in the input document ("symptoms[0].components[2].cost") when one exists.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, std::string path = {})
        : std::runtime_error(path.empty() ? message : path + ": " + message),
          kind_(kind),
          path_(std::move(path)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& path() const noexcept { return path_; }

private:
    ErrorKind kind_;
    std::string path_;
};

// File or socket failure, kept apart from model errors so callers can map it
// to a different exit status.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace seqdiag
