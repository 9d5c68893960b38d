#pragma once

#include <string>
#include <string_view>

namespace edgar {

/// Lowercase hex SHA-1 of the input bytes.
std::string sha1_hex(std::string_view data);

/// Lowercase hex SHA-256 of the input bytes.
std::string sha256_hex(std::string_view data);

/// Raw (binary) HMAC-SHA256.
std::string hmac_sha256(std::string_view key, std::string_view data);

/// True for exactly 40 lowercase hex characters.
bool is_sha1_hex(std::string_view text) noexcept;

std::string to_hex(std::string_view bytes);

} // namespace edgar
