#pragma once

#include <stdexcept>
#include <string>

namespace qsplit {

enum class ErrorCode {
    InvalidArgument,
    UnsupportedSize,
    IntegrationFailure,
    Nonconvergence,
    SingularityContact,
    StructureViolation,
    InvalidBracket,
    Inconclusive,
    Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; the C API maps it onto a status value.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, const std::string& what) {
    if (!cond) {
        throw Error(ErrorCode::InvalidArgument, what);
    }
}

} // namespace qsplit
