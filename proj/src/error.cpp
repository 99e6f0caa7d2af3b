#include "qsplit/error.hpp"

namespace qsplit {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::UnsupportedSize: return "unsupported-size";
    case ErrorCode::IntegrationFailure: return "integration-failure";
    case ErrorCode::Nonconvergence: return "nonconvergence";
    case ErrorCode::SingularityContact: return "singularity-contact";
    case ErrorCode::StructureViolation: return "structure-violation";
    case ErrorCode::InvalidBracket: return "invalid-bracket";
    case ErrorCode::Inconclusive: return "inconclusive";
    case ErrorCode::Io: return "io";
    }
    return "unknown";
}

} // namespace qsplit
