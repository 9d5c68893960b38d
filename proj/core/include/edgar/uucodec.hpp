#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace edgar {

/// True when the first non-blank line looks like "begin <octal mode> <name>".
bool looks_uuencoded(std::string_view text) noexcept;

/// Classic uudecode. Decoding starts after the first begin line and stops at
/// "end". A missing "end", trailing junk, and lines short by at most one
/// 4-character group (stripped trailing spaces) are tolerated and noted in
/// `warnings`. Throws MalformedUuencode when there is no begin line or a line
/// is too short for its declared byte count.
std::string uudecode(std::string_view text, std::vector<std::string>* warnings = nullptr);

/// Classic uuencode with 45-byte lines and '`' for zero sextets.
std::string uuencode(std::string_view data, std::string_view file_name = "data", std::string_view mode = "644");

} // namespace edgar
