#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace glsb {

enum class ErrorCode {
    InvalidArgument,
    NotFound,
    ParseError,
    SchemaViolation,
    Conflict,
    Network,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure surfaced by the library. The code lets
/// callers (CLI, HTTP layer) map failures without string matching.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace glsb
