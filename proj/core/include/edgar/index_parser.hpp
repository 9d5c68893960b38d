#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/date.hpp"

namespace edgar {

/// One entry of a company/form/master/xbrl index.
struct IndexRow {
    std::uint64_t cik = 0;
    std::string company_name;
    std::string form_type;   // trimmed, uppercased
    Date date_filed{};
    std::string file_name;   // archive-relative, e.g. edgar/data/320193/...txt

    friend bool operator==(const IndexRow&, const IndexRow&) = default;
};

enum class IndexFormat { fixed_width, pipe_delimited };

std::string_view to_string(IndexFormat format) noexcept;

enum class IndexField { cik, company_name, form_type, date_filed, file_name };

std::string_view to_string(IndexField field) noexcept;

struct MalformedLine {
    std::size_t line_number = 0;   // 1-based, counted in the decoded text
    std::string raw_line;
    std::string reason;

    friend bool operator==(const MalformedLine&, const MalformedLine&) = default;
};

/// Every non-blank line below the header block lands in exactly one of
/// `rows` or `malformed_lines`; `data_line_count` is their sum.
struct IndexParseReport {
    std::vector<IndexRow> rows;
    std::vector<MalformedLine> malformed_lines;
    IndexFormat detected_format = IndexFormat::pipe_delimited;
    bool was_compressed = false;
    std::size_t data_line_count = 0;
};

struct ColumnSpan {
    IndexField field;
    std::size_t start = 0;
    std::size_t end = 0;   // exclusive

    friend bool operator==(const ColumnSpan&, const ColumnSpan&) = default;
};

struct IndexParseOptions {
    std::vector<std::string> file_suffixes = {".txt", ".nc"};
};

struct Decompressed {
    std::string bytes;
    bool was_compressed = false;
};

/// Inflates gzip input (detected by the 0x1F 0x8B magic), passes anything
/// else through. Throws CorruptCompression for a bad gzip stream.
Decompressed decompress_if_needed(std::string_view raw);

/// pipe_delimited iff the first data line has at least four '|' separators.
/// Throws EmptyInput for blank text.
IndexFormat sniff_format(std::string_view text);

/// Column spans for a fixed-width index. Each span starts at its header
/// token and runs to the start of the next token; the last one runs to the
/// longest line seen. Throws MissingColumn if a field name is absent.
std::vector<ColumnSpan> infer_columns(std::string_view header_line, std::span<const std::string_view> data_lines);

/// decompress -> decode -> sniff -> split -> validate. Whole-file problems
/// throw (CorruptCompression, EmptyInput, MissingColumn); bad rows are
/// reported in `malformed_lines`.
IndexParseReport parse_index(std::string_view raw, const IndexParseOptions& options = {});

/// Pipe-delimited table with a master.idx style header, one line per row.
std::string to_delimited_table(std::span<const IndexRow> rows);

} // namespace edgar
