#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <optional>

#include "edgar/text_codec.hpp"
#include "edgar/text_extract.hpp"

namespace edgar {

namespace {

bool is_alpha(char c) noexcept { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }
bool is_space(char c) noexcept { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

char lower(char c) noexcept { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

bool starts_with_ci(std::string_view text, std::size_t pos, std::string_view prefix) noexcept
{
    if (text.size() - std::min(pos, text.size()) < prefix.size()) {
        return false;
    }
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        if (lower(text[pos + i]) != prefix[i]) {
            return false;
        }
    }
    return true;
}

std::size_t find_ci(std::string_view text, std::string_view needle, std::size_t from)
{
    for (std::size_t pos = from; pos + needle.size() <= text.size(); ++pos) {
        if (starts_with_ci(text, pos, needle)) {
            return pos;
        }
    }
    return std::string_view::npos;
}

constexpr std::string_view kBlockTags[] = {
    "address", "article", "aside",  "blockquote", "body",   "br",     "caption", "center",
    "dd",                        "div",     "dl",     "dt",         "fieldset", "footer", "form",  "h1",
    "h2",                        "h3",      "h4",     "h5",         "h6",     "head",   "header",  "hr",
    "html",                      "li",      "nav",    "ol",         "p",      "pre",    "section", "table",
    "tbody",                     "tfoot",   "thead",  "title",      "tr",     "ul",
};

bool is_block_tag(std::string_view name)
{
    return std::find(std::begin(kBlockTags), std::end(kBlockTags), name) != std::end(kBlockTags);
}

// End of a tag starting at `pos` ('<'), honouring quoted attribute values.
std::size_t tag_end(std::string_view html, std::size_t pos)
{
    char quote = 0;
    for (std::size_t i = pos + 1; i < html.size(); ++i) {
        const char c = html[i];
        if (quote) {
            if (c == quote) {
                quote = 0;
            }
        } else if (c == '"' || c == '\'') {
            // Quotes only count inside the attribute area, after '='.
            if (i > 0 && (html[i - 1] == '=' || is_space(html[i - 1]))) {
                quote = c;
            }
        } else if (c == '>') {
            return i;
        }
    }
    return html.size();
}

std::string_view charset_label(std::string_view html)
{
    const auto head = html.substr(0, 4096);
    const auto pos = find_ci(head, "charset", 0);
    if (pos == std::string_view::npos) {
        return {};
    }
    auto i = pos + 7;
    while (i < head.size() && (is_space(head[i]) || head[i] == '=' || head[i] == '"' || head[i] == '\'')) {
        ++i;
    }
    auto j = i;
    while (j < head.size() && (is_alpha(head[j]) || is_digit(head[j]) || head[j] == '-' || head[j] == '_')) {
        ++j;
    }
    return head.substr(i, j - i);
}

void collapse_lines(const std::string& raw, std::string& out)
{
    bool pending_blank = false;
    bool any = false;
    std::size_t start = 0;
    while (start <= raw.size()) {
        auto end = raw.find('\n', start);
        if (end == std::string::npos) {
            end = raw.size();
        }
        std::string line;
        bool space = false;
        for (std::size_t i = start; i < end; ++i) {
            const char c = raw[i];
            if (c == ' ' || c == '\t' || c == '\f' || c == '\v' || c == '\r') {
                space = true;
                continue;
            }
            if (space && !line.empty()) {
                line.push_back(' ');
            }
            space = false;
            line.push_back(c);
        }
        if (line.empty()) {
            pending_blank = any;
        } else {
            if (any) {
                out += pending_blank ? "\n\n" : "\n";
            }
            out += line;
            any = true;
            pending_blank = false;
        }
        start = end + 1;
    }
}

} // namespace

std::string decode_html_bytes(std::string_view html)
{
    if (html.substr(0, 3) == "\xEF\xBB\xBF") {
        html.remove_prefix(3);
    }
    const auto label = to_lower_ascii(charset_label(html));
    if (label == "windows-1252" || label == "cp1252" || label == "iso-8859-1" || label == "latin1" ||
        label == "iso8859-1" || label == "latin-1") {
        return is_valid_utf8(html) && std::all_of(html.begin(), html.end(), [](char c) {
                   return static_cast<unsigned char>(c) < 0x80;
               })
                   ? std::string(html)
                   : cp1252_to_utf8(html);
    }
    if (label == "utf-8" || label == "utf8") {
        return sanitize_utf8(html);
    }
    return decode_text(html);
}

std::string normalize_plain_text(std::string_view body)
{
    auto text = decode_text(body);
    if (std::string_view(text).substr(0, 3) == "\xEF\xBB\xBF") {
        text.erase(0, 3);
    }
    return normalize_newlines(text);
}

std::string html_to_text(std::string_view input, std::vector<std::string>* warnings)
{
    const auto html_storage = decode_html_bytes(input);
    const std::string_view html = html_storage;
    std::string raw;
    raw.reserve(html.size());
    int pre_depth = 0;

    for (std::size_t i = 0; i < html.size();) {
        const char c = html[i];
        if (c == '<') {
            if (html.substr(i, 4) == "<!--") {
                const auto end = html.find("-->", i + 4);
                i = end == std::string_view::npos ? html.size() : end + 3;
                continue;
            }
            const bool opens_tag = i + 1 < html.size() &&
                                   (is_alpha(html[i + 1]) || html[i + 1] == '/' || html[i + 1] == '!' || html[i + 1] == '?');
            if (!opens_tag) {
                raw.push_back(c);
                ++i;
                continue;
            }
            const auto end = tag_end(html, i);
            const bool closing = html[i + 1] == '/';
            std::size_t n = i + (closing ? 2 : 1);
            std::string name;
            while (n < end && (is_alpha(html[n]) || is_digit(html[n]))) {
                name.push_back(lower(html[n++]));
            }
            i = end == html.size() ? end : end + 1;
            if (!closing && (name == "script" || name == "style")) {
                const auto close = find_ci(html, "</" + name, i);
                i = close == std::string_view::npos ? html.size() : std::min(html.size(), tag_end(html, close) + 1);
                continue;
            }
            if (name == "pre") {
                pre_depth = std::max(0, pre_depth + (closing ? -1 : 1));
            }
            if (is_block_tag(name)) {
                raw.push_back('\n');
            } else if (name == "td" || name == "th") {
                raw.push_back(' ');
            }
            continue;
        }
        if (c == '&') {
            std::size_t j = i + 1;
            std::optional<char32_t> code;
            bool numeric = j < html.size() && html[j] == '#';
            bool terminated = false;
            if (numeric) {
                ++j;
                const bool hex = j < html.size() && (html[j] == 'x' || html[j] == 'X');
                if (hex) {
                    ++j;
                }
                const auto digits_start = j;
                std::uint32_t value = 0;
                while (j < html.size() && j - digits_start < 8 &&
                       (is_digit(html[j]) || (hex && std::isxdigit(static_cast<unsigned char>(html[j]))))) {
                    const char d = lower(html[j]);
                    value = value * (hex ? 16 : 10) + static_cast<std::uint32_t>(is_digit(d) ? d - '0' : d - 'a' + 10);
                    ++j;
                }
                if (j > digits_start) {
                    terminated = j < html.size() && html[j] == ';';
                    if (value >= 0x80 && value <= 0x9F) {
                        const auto mapped = cp1252_to_utf8(std::string(1, static_cast<char>(value)));
                        raw += mapped;
                    } else if (value == 0 || value > 0x10FFFF || (value >= 0xD800 && value <= 0xDFFF)) {
                        append_utf8(raw, 0xFFFD);
                    } else if (value == 0xA0) {
                        raw.push_back(' ');
                    } else {
                        append_utf8(raw, static_cast<char32_t>(value));
                    }
                    i = terminated ? j + 1 : j;
                    continue;
                }
            } else {
                while (j < html.size() && j - i <= 32 && (is_alpha(html[j]) || is_digit(html[j]))) {
                    ++j;
                }
                if (j > i + 1 && j < html.size() && html[j] == ';') {
                    const auto name = html.substr(i + 1, j - i - 1);
                    code = lookup_html_entity(name);
                    if (code) {
                        if (*code == 0xA0) {
                            raw.push_back(' ');
                        } else {
                            append_utf8(raw, *code);
                        }
                        i = j + 1;
                        continue;
                    }
                    if (warnings) {
                        warnings->push_back("unknown entity &" + std::string(name) + ";");
                    }
                }
            }
            raw.push_back('&');
            ++i;
            continue;
        }
        if (c == '\xC2' && i + 1 < html.size() && html[i + 1] == '\xA0') {
            raw.push_back(' ');
            i += 2;
            continue;
        }
        if (pre_depth == 0 && (c == '\n' || c == '\r')) {
            raw.push_back(' ');
        } else if (c == '\r') {
            if (i + 1 >= html.size() || html[i + 1] != '\n') {
                raw.push_back('\n');
            }
        } else {
            raw.push_back(c);
        }
        ++i;
    }

    std::string out;
    collapse_lines(raw, out);
    return out;
}

} // namespace edgar
