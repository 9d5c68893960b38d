#include "edgar/error.hpp"

namespace edgar {

std::string_view to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidPath: return "InvalidPath";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidDigest: return "InvalidDigest";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::RateLimited: return "RateLimited";
    case ErrorCode::AccessDenied: return "AccessDenied";
    case ErrorCode::Transport: return "Transport";
    case ErrorCode::CorruptCompression: return "CorruptCompression";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NotAFiling: return "NotAFiling";
    case ErrorCode::MissingAccession: return "MissingAccession";
    case ErrorCode::MalformedUuencode: return "MalformedUuencode";
    case ErrorCode::BackendUnavailable: return "BackendUnavailable";
    case ErrorCode::QuotaExceeded: return "QuotaExceeded";
    case ErrorCode::CorruptObject: return "CorruptObject";
    case ErrorCode::Locked: return "Locked";
    case ErrorCode::StorageFailure: return "StorageFailure";
    case ErrorCode::IllegalTransition: return "IllegalTransition";
    case ErrorCode::ConstraintViolation: return "ConstraintViolation";
    case ErrorCode::ServiceUnavailable: return "ServiceUnavailable";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code)
{
}

} // namespace edgar
