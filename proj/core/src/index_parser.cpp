#include "edgar/index_parser.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <variant>

#include "edgar/compression.hpp"
#include "edgar/error.hpp"
#include "edgar/text_codec.hpp"

namespace edgar {

std::string_view to_string(IndexFormat format) noexcept
{
    return format == IndexFormat::fixed_width ? "fixed_width" : "pipe_delimited";
}

std::string_view to_string(IndexField field) noexcept
{
    switch (field) {
    case IndexField::cik: return "cik";
    case IndexField::company_name: return "company_name";
    case IndexField::form_type: return "form_type";
    case IndexField::date_filed: return "date_filed";
    case IndexField::file_name: return "file_name";
    }
    return "unknown";
}

namespace {

constexpr std::array kFields = {IndexField::cik, IndexField::company_name, IndexField::form_type,
                                IndexField::date_filed, IndexField::file_name};

// Header spellings, lowercase. The master index says "Filename", the
// fixed-width ones say "File Name".
std::vector<std::string_view> header_names(IndexField field)
{
    switch (field) {
    case IndexField::cik: return {"cik"};
    case IndexField::company_name: return {"company name"};
    case IndexField::form_type: return {"form type"};
    case IndexField::date_filed: return {"date filed"};
    case IndexField::file_name: return {"file name", "filename"};
    }
    return {};
}

bool is_word_char(char c) noexcept
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::size_t find_word(std::string_view haystack_lower, std::string_view needle)
{
    for (auto pos = haystack_lower.find(needle); pos != std::string_view::npos;
         pos = haystack_lower.find(needle, pos + 1)) {
        const bool left_ok = pos == 0 || !is_word_char(haystack_lower[pos - 1]);
        const auto after = pos + needle.size();
        const bool right_ok = after >= haystack_lower.size() || !is_word_char(haystack_lower[after]);
        if (left_ok && right_ok) {
            return pos;
        }
    }
    return std::string_view::npos;
}

std::size_t find_field(std::string_view header_lower, IndexField field)
{
    for (auto name : header_names(field)) {
        if (auto pos = find_word(header_lower, name); pos != std::string_view::npos) {
            return pos;
        }
    }
    return std::string_view::npos;
}

bool is_header_line(std::string_view line)
{
    const auto lower = to_lower_ascii(line);
    return std::all_of(kFields.begin(), kFields.end(),
                       [&](IndexField f) { return find_field(lower, f) != std::string_view::npos; });
}

bool is_dash_rule(std::string_view line)
{
    const auto t = trim(line);
    return t.size() >= 3 && t.find_first_not_of('-') == std::string_view::npos;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::vector<std::string_view> split_lines(std::string_view text)
{
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

struct Layout {
    std::size_t header = std::string_view::npos;   // index into lines
    std::size_t data_start = 0;
    IndexFormat format = IndexFormat::pipe_delimited;
};

Layout analyse(const std::vector<std::string_view>& lines)
{
    Layout layout;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (is_header_line(lines[i])) {
            layout.header = i;
            break;
        }
    }
    if (layout.header != std::string_view::npos) {
        layout.data_start = layout.header + 1;
        if (layout.data_start < lines.size() && is_dash_rule(lines[layout.data_start])) {
            ++layout.data_start;
        }
    }
    std::string_view probe;
    for (std::size_t i = layout.data_start; i < lines.size(); ++i) {
        if (!is_blank(lines[i])) {
            probe = lines[i];
            break;
        }
    }
    if (probe.empty() && layout.header != std::string_view::npos) {
        probe = lines[layout.header];
    }
    layout.format =
        std::count(probe.begin(), probe.end(), '|') >= 4 ? IndexFormat::pipe_delimited : IndexFormat::fixed_width;
    return layout;
}

std::string_view column(std::string_view line, std::size_t start, std::size_t end)
{
    if (start >= line.size()) {
        return {};
    }
    return trim(line.substr(start, std::min(end, line.size()) - start));
}

using RowResult = std::variant<IndexRow, std::string>;

RowResult validate_row(const std::array<std::string_view, 5>& fields, const IndexParseOptions& options)
{
    const auto value = [&](IndexField f) { return fields[static_cast<std::size_t>(f)]; };

    const auto cik_text = value(IndexField::cik);
    if (cik_text.empty()) {
        return std::string("missing cik");
    }
    std::uint64_t cik = 0;
    auto [ptr, ec] = std::from_chars(cik_text.data(), cik_text.data() + cik_text.size(), cik);
    if (ec != std::errc{} || ptr != cik_text.data() + cik_text.size() || cik == 0) {
        return "invalid cik '" + std::string(cik_text) + "'";
    }
    if (value(IndexField::company_name).empty()) {
        return std::string("missing company_name");
    }
    if (value(IndexField::form_type).empty()) {
        return std::string("missing form_type");
    }
    const auto date_text = value(IndexField::date_filed);
    if (date_text.empty()) {
        return std::string("missing date_filed");
    }
    const auto date = parse_flexible_date(date_text);
    if (!date) {
        return "invalid date_filed '" + std::string(date_text) + "'";
    }
    const auto file_name = value(IndexField::file_name);
    if (file_name.empty()) {
        return std::string("missing file_name");
    }
    const auto lower_name = to_lower_ascii(file_name);
    const bool suffix_ok = std::any_of(options.file_suffixes.begin(), options.file_suffixes.end(), [&](const auto& s) {
        return lower_name.size() >= s.size() && lower_name.compare(lower_name.size() - s.size(), s.size(), to_lower_ascii(s)) == 0;
    });
    if (!suffix_ok) {
        return "file_name '" + std::string(file_name) + "' lacks an accepted suffix";
    }
    IndexRow row;
    row.cik = cik;
    row.company_name = std::string(value(IndexField::company_name));
    row.form_type = to_upper_ascii(value(IndexField::form_type));
    row.date_filed = *date;
    row.file_name = std::string(file_name);
    return row;
}

} // namespace

Decompressed decompress_if_needed(std::string_view raw)
{
    if (has_gzip_magic(raw)) {
        return {gzip_decompress(raw), true};
    }
    return {std::string(raw), false};
}

IndexFormat sniff_format(std::string_view text)
{
    if (is_blank(text)) {
        throw Error(ErrorCode::EmptyInput, "index text is empty");
    }
    return analyse(split_lines(text)).format;
}

std::vector<ColumnSpan> infer_columns(std::string_view header_line, std::span<const std::string_view> data_lines)
{
    const auto lower = to_lower_ascii(header_line);
    std::vector<ColumnSpan> spans;
    for (auto field : kFields) {
        const auto pos = find_field(lower, field);
        if (pos == std::string_view::npos) {
            throw Error(ErrorCode::MissingColumn, std::string(to_string(field)) + " column missing from header");
        }
        spans.push_back({field, pos, 0});
    }
    std::sort(spans.begin(), spans.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
    std::size_t widest = header_line.size();
    for (auto line : data_lines) {
        widest = std::max(widest, line.size());
    }
    for (std::size_t i = 0; i < spans.size(); ++i) {
        spans[i].end = i + 1 < spans.size() ? spans[i + 1].start : widest;
    }
    return spans;
}

IndexParseReport parse_index(std::string_view raw, const IndexParseOptions& options)
{
    IndexParseReport report;
    auto decompressed = decompress_if_needed(raw);
    report.was_compressed = decompressed.was_compressed;
    const auto text = decode_text(decompressed.bytes);
    if (is_blank(text)) {
        throw Error(ErrorCode::EmptyInput, "index file has no content");
    }
    const auto lines = split_lines(text);
    const auto layout = analyse(lines);
    report.detected_format = layout.format;

    std::vector<std::string_view> data_lines;
    std::vector<std::size_t> data_line_numbers;
    for (std::size_t i = layout.data_start; i < lines.size(); ++i) {
        if (!is_blank(lines[i])) {
            data_lines.push_back(lines[i]);
            data_line_numbers.push_back(i + 1);
        }
    }
    report.data_line_count = data_lines.size();

    const auto accept = [&](std::size_t k, RowResult result) {
        if (auto* row = std::get_if<IndexRow>(&result)) {
            report.rows.push_back(std::move(*row));
        } else {
            report.malformed_lines.push_back(
                {data_line_numbers[k], std::string(data_lines[k]), std::get<std::string>(std::move(result))});
        }
    };

    if (layout.format == IndexFormat::pipe_delimited) {
        // Column order comes from the header when there is one.
        std::array<std::size_t, 5> position{0, 1, 2, 3, 4};
        std::size_t column_count = position.size();
        if (layout.header != std::string_view::npos) {
            std::vector<std::string> names;
            auto header = lines[layout.header];
            for (std::size_t start = 0;;) {
                const auto bar = header.find('|', start);
                names.push_back(to_lower_ascii(trim(header.substr(start, bar == std::string_view::npos ? bar : bar - start))));
                if (bar == std::string_view::npos) {
                    break;
                }
                start = bar + 1;
            }
            for (auto field : kFields) {
                const auto spellings = header_names(field);
                const auto it = std::find_if(names.begin(), names.end(), [&](const auto& n) {
                    return std::find(spellings.begin(), spellings.end(), n) != spellings.end();
                });
                if (it == names.end()) {
                    throw Error(ErrorCode::MissingColumn, std::string(to_string(field)) + " column missing from header");
                }
                position[static_cast<std::size_t>(field)] = static_cast<std::size_t>(it - names.begin());
            }
            column_count = names.size();
        }
        for (std::size_t k = 0; k < data_lines.size(); ++k) {
            std::vector<std::string_view> parts;
            const auto line = data_lines[k];
            for (std::size_t start = 0;;) {
                const auto bar = line.find('|', start);
                parts.push_back(trim(line.substr(start, bar == std::string_view::npos ? bar : bar - start)));
                if (bar == std::string_view::npos) {
                    break;
                }
                start = bar + 1;
            }
            if (parts.size() != column_count) {
                accept(k, "expected " + std::to_string(column_count) + " fields, found " + std::to_string(parts.size()));
                continue;
            }
            std::array<std::string_view, 5> fields;
            for (auto field : kFields) {
                fields[static_cast<std::size_t>(field)] = parts[position[static_cast<std::size_t>(field)]];
            }
            accept(k, validate_row(fields, options));
        }
    } else {
        if (layout.header == std::string_view::npos) {
            throw Error(ErrorCode::MissingColumn, "fixed-width index has no recognisable header line");
        }
        const auto spans = infer_columns(lines[layout.header], data_lines);
        for (std::size_t k = 0; k < data_lines.size(); ++k) {
            std::array<std::string_view, 5> fields;
            for (const auto& span : spans) {
                fields[static_cast<std::size_t>(span.field)] = column(data_lines[k], span.start, span.end);
            }
            accept(k, validate_row(fields, options));
        }
    }
    return report;
}

std::string to_delimited_table(std::span<const IndexRow> rows)
{
    std::string out = "CIK|Company Name|Form Type|Date Filed|Filename\n";
    out += std::string(80, '-');
    out += '\n';
    for (const auto& row : rows) {
        out += std::to_string(row.cik);
        out += '|';
        out += row.company_name;
        out += '|';
        out += row.form_type;
        out += '|';
        out += to_iso(row.date_filed);
        out += '|';
        out += row.file_name;
        out += '\n';
    }
    return out;
}

} // namespace edgar
