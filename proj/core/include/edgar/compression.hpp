#pragma once

#include <string>
#include <string_view>

namespace edgar {

bool has_gzip_magic(std::string_view data) noexcept;

/// Produces a single gzip member with a zeroed mtime, so equal input always
/// yields equal output.
std::string gzip_compress(std::string_view data);

/// Inflates every concatenated gzip member. Throws CorruptCompression on any
/// stream error or truncated input.
std::string gzip_decompress(std::string_view data);

} // namespace edgar
