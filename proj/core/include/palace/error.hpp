#pragma once

#include <stdexcept>
#include <string>

namespace palace {

enum class ErrorKind {
    invalid_input,
    not_found,
    config,
    parse,
    io,
    embedding,
};

// All recoverable library failures are thrown as Error; the kind maps to
// CLI exit codes and JSON-RPC error codes at the boundaries.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::invalid_input: return "invalid-input";
        case ErrorKind::not_found: return "not-found";
        case ErrorKind::config: return "config-error";
        case ErrorKind::parse: return "parse-error";
        case ErrorKind::io: return "io-error";
        case ErrorKind::embedding: return "embedding-error";
    }
    return "error";
}

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace palace
