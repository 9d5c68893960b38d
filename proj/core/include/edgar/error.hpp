#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace edgar {

/// Every failure raised by the library carries one of these codes so callers
/// can branch on the category without parsing messages.
enum class ErrorCode {
    InvalidPath,
    InvalidArgument,
    InvalidDigest,
    InvalidConfig,
    NotFound,
    RateLimited,
    AccessDenied,
    Transport,
    CorruptCompression,
    EmptyInput,
    MissingColumn,
    NotAFiling,
    MissingAccession,
    MalformedUuencode,
    BackendUnavailable,
    QuotaExceeded,
    CorruptObject,
    Locked,
    StorageFailure,
    IllegalTransition,
    ConstraintViolation,
    ServiceUnavailable,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace edgar
