#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace edgar {

/// Half-open interval [begin, end) over a byte sequence.
struct ByteRange {
    std::uint64_t begin = 0;
    std::uint64_t end = 0;

    std::uint64_t length() const noexcept { return end > begin ? end - begin : 0; }
    bool valid() const noexcept { return begin < end; }

    friend bool operator==(const ByteRange&, const ByteRange&) = default;
};

/// Throws InvalidPath unless begin < end.
void require_valid(const ByteRange& range);

/// Slice clamped to the data: a range running past the end yields the tail,
/// a range starting past the end yields an empty string.
std::string slice(std::string_view data, const ByteRange& range);

} // namespace edgar
