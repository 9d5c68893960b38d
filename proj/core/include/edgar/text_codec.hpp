#pragma once

#include <string>
#include <string_view>

namespace edgar {

bool is_valid_utf8(std::string_view data) noexcept;

std::string latin1_to_utf8(std::string_view data);

/// Windows-1252: Latin-1 except for the 0x80-0x9F block.
std::string cp1252_to_utf8(std::string_view data);

/// Replaces each invalid UTF-8 sequence with U+FFFD.
std::string sanitize_utf8(std::string_view data);

/// UTF-8 when the bytes validate, Latin-1 otherwise. Never fails.
std::string decode_text(std::string_view data);

/// CRLF and lone CR become LF.
std::string normalize_newlines(std::string_view text);

std::string to_lower_ascii(std::string_view text);
std::string to_upper_ascii(std::string_view text);
std::string_view trim(std::string_view text) noexcept;

void append_utf8(std::string& out, char32_t code_point);

} // namespace edgar
