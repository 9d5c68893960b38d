#include "edgar/content_type.hpp"

#include <array>
#include <utility>

#include "edgar/text_codec.hpp"

namespace edgar {

namespace {

bool starts_with(std::string_view text, std::string_view prefix) { return text.substr(0, prefix.size()) == prefix; }

constexpr std::array<std::pair<std::string_view, std::string_view>, 5> kMagic = {{
    {"%PDF", "application/pdf"},
    {std::string_view("PK\x03\x04", 4), "application/zip"},
    {"GIF8", "image/gif"},
    {"\x89PNG", "image/png"},
    {"\xFF\xD8", "image/jpeg"},
}};

constexpr std::array<std::pair<std::string_view, std::string_view>, 18> kExtensions = {{
    {"htm", "text/html"},
    {"html", "text/html"},
    {"xml", "text/xml"},
    {"xsd", "text/xml"},
    {"txt", "text/plain"},
    {"nc", "text/plain"},
    {"pdf", "application/pdf"},
    {"zip", "application/zip"},
    {"gif", "image/gif"},
    {"png", "image/png"},
    {"jpg", "image/jpeg"},
    {"jpeg", "image/jpeg"},
    {"json", "application/json"},
    {"js", "application/javascript"},
    {"css", "text/css"},
    {"xls", "application/vnd.ms-excel"},
    {"xlsx", "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet"},
    {"doc", "application/msword"},
}};

} // namespace

std::optional<std::string> content_type_for_extension(std::string_view filename)
{
    const auto dot = filename.rfind('.');
    if (dot == std::string_view::npos || dot + 1 >= filename.size()) {
        return std::nullopt;
    }
    const auto ext = to_lower_ascii(trim(filename.substr(dot + 1)));
    for (const auto& [known, type] : kExtensions) {
        if (ext == known) {
            return std::string(type);
        }
    }
    return std::nullopt;
}

std::string detect_content_type(std::string_view body, std::optional<std::string_view> filename)
{
    for (const auto& [magic, type] : kMagic) {
        if (starts_with(body, magic)) {
            return std::string(type);
        }
    }

    auto lead = body;
    if (starts_with(lead, "\xEF\xBB\xBF")) {
        lead.remove_prefix(3);
    }
    const auto first = lead.find_first_not_of(" \t\r\n\f");
    if (first != std::string_view::npos) {
        const auto head = to_lower_ascii(lead.substr(first, 16));
        if (starts_with(head, "<?xml")) {
            return "text/xml";
        }
        if (starts_with(head, "<html") || starts_with(head, "<!doctype html")) {
            return "text/html";
        }
    }

    if (filename) {
        if (auto type = content_type_for_extension(*filename)) {
            return *type;
        }
    }
    return "text/plain";
}

} // namespace edgar
