#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edgar/date.hpp"

namespace edgar {

enum class HeaderKind { sec_header, ims_header };

std::string_view to_string(HeaderKind kind) noexcept;

struct FilingHeader {
    std::string accession_number;
    std::optional<std::uint64_t> cik;
    std::string company_name;
    std::string form_type;
    std::optional<std::string> sic;
    std::optional<Date> date_filed;
    std::optional<Date> period;
    HeaderKind header_kind = HeaderKind::sec_header;
    /// Every tag not mapped to a field above, in file order. Repeated tags
    /// (a second FILER block, say) keep every occurrence.
    std::vector<std::pair<std::string, std::string>> extra;

    friend bool operator==(const FilingHeader&, const FilingHeader&) = default;
};

struct ParseWarning {
    std::string location;
    std::string message;

    friend bool operator==(const ParseWarning&, const ParseWarning&) = default;
};

struct ParsedDocument {
    std::uint32_t sequence = 1;
    std::optional<std::string> doc_type;
    std::optional<std::string> filename;
    std::optional<std::string> description;
    std::string body;
    bool was_uuencoded = false;
    std::string content_type;
    std::string sha1;

    friend bool operator==(const ParsedDocument&, const ParsedDocument&) = default;
};

/// `header` is empty when the filing had documents but no usable header
/// block; a "HeaderMissing" or "MissingAccession" warning says which.
struct ParsedFiling {
    std::optional<FilingHeader> header;
    std::vector<ParsedDocument> documents;
    std::vector<ParseWarning> warnings;

    friend bool operator==(const ParsedFiling&, const ParsedFiling&) = default;
};

inline constexpr std::string_view kUnparseableDocument = "unparseable document";
inline constexpr std::string_view kHeaderMissing = "HeaderMissing";

/// Throws NotAFiling when the input has neither a header tag nor a DOCUMENT
/// tag. Everything else degrades to warnings.
ParsedFiling parse_filing(std::string_view raw);

/// `text` starts at <SEC-HEADER> or <IMS-HEADER>. Accepts both "NAME: value"
/// and "<TAG>value" lines. Throws MissingAccession when no well-formed
/// accession number is present.
FilingHeader parse_header(std::string_view text);

/// Parses one DOCUMENT segment (with or without the surrounding tags).
/// `position` is the 1-based document index used when SEQUENCE is missing.
ParsedDocument parse_document(std::string_view segment, std::uint32_t position, std::vector<ParseWarning>& warnings);
ParsedDocument parse_document(std::string_view segment);

/// \d{10}-\d{2}-\d{6}
bool is_accession_number(std::string_view text) noexcept;

/// "edgar/data/320193/0000320193-18-000001.txt" -> "0000320193-18-000001"
std::optional<std::string> accession_from_path(std::string_view edgar_path);

/// Human-readable dump used by the audit command.
std::string to_audit_dump(const ParsedFiling& filing);

} // namespace edgar
