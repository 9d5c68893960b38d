#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace edgar {

/// Magic bytes, then leading markup, then the filename extension, then
/// text/plain.
std::string detect_content_type(std::string_view body, std::optional<std::string_view> filename = std::nullopt);

/// Extension lookup only ("doc.htm" -> text/html); nullopt when unknown.
std::optional<std::string> content_type_for_extension(std::string_view filename);

} // namespace edgar
