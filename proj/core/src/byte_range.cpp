#include "edgar/byte_range.hpp"

#include "edgar/error.hpp"

namespace edgar {

void require_valid(const ByteRange& range)
{
    if (!range.valid()) {
        throw Error(ErrorCode::InvalidPath, "byte range [" + std::to_string(range.begin) + ", " +
                                                    std::to_string(range.end) + ") is empty or reversed");
    }
}

std::string slice(std::string_view data, const ByteRange& range)
{
    if (range.begin >= data.size()) {
        return {};
    }
    const auto end = std::min<std::uint64_t>(range.end, data.size());
    return std::string(data.substr(range.begin, end - range.begin));
}

} // namespace edgar
