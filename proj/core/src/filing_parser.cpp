#include "edgar/filing_parser.hpp"

#include <algorithm>
#include <charconv>
#include <map>

#include "edgar/content_type.hpp"
#include "edgar/digest.hpp"
#include "edgar/error.hpp"
#include "edgar/text_codec.hpp"
#include "edgar/uucodec.hpp"

namespace edgar {

std::string_view to_string(HeaderKind kind) noexcept
{
    return kind == HeaderKind::ims_header ? "ims_header" : "sec_header";
}

namespace {

enum class HeaderField { accession, form_type, company_name, cik, sic, date_filed, period };

const std::map<std::string, HeaderField, std::less<>>& header_fields()
{
    static const std::map<std::string, HeaderField, std::less<>> fields = {
        {"ACCESSION NUMBER", HeaderField::accession},
        {"ACCESSION-NUMBER", HeaderField::accession},
        {"CONFORMED SUBMISSION TYPE", HeaderField::form_type},
        {"TYPE", HeaderField::form_type},
        {"COMPANY CONFORMED NAME", HeaderField::company_name},
        {"CONFORMED-NAME", HeaderField::company_name},
        {"CENTRAL INDEX KEY", HeaderField::cik},
        {"CIK", HeaderField::cik},
        {"STANDARD INDUSTRIAL CLASSIFICATION", HeaderField::sic},
        {"ASSIGNED-SIC", HeaderField::sic},
        {"FILED AS OF DATE", HeaderField::date_filed},
        {"FILING-DATE", HeaderField::date_filed},
        {"CONFORMED PERIOD OF REPORT", HeaderField::period},
        {"PERIOD", HeaderField::period},
    };
    return fields;
}

std::string_view strip_cr(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

template <typename F>
void for_each_line(std::string_view text, F&& fn)
{
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        if (!fn(strip_cr(text.substr(start, end - start)), start)) {
            return;
        }
        start = end + 1;
    }
}

// Offsets of `tag` where it opens a line.
std::vector<std::size_t> find_line_tags(std::string_view text, std::string_view tag, std::size_t from = 0,
                                        std::size_t to = std::string_view::npos)
{
    std::vector<std::size_t> hits;
    to = std::min(to, text.size());
    for (auto pos = text.find(tag, from); pos != std::string_view::npos && pos < to; pos = text.find(tag, pos + 1)) {
        if (pos == 0 || text[pos - 1] == '\n') {
            hits.push_back(pos);
        }
    }
    return hits;
}

std::size_t find_line_tag(std::string_view text, std::string_view tag, std::size_t from = 0)
{
    for (auto pos = text.find(tag, from); pos != std::string_view::npos; pos = text.find(tag, pos + 1)) {
        if (pos == 0 || text[pos - 1] == '\n') {
            return pos;
        }
    }
    return std::string_view::npos;
}

std::size_t after_line(std::string_view text, std::size_t pos)
{
    const auto nl = text.find('\n', pos);
    return nl == std::string_view::npos ? text.size() : nl + 1;
}

std::optional<std::uint64_t> parse_positive(std::string_view text)
{
    text = trim(text);
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || value == 0) {
        return std::nullopt;
    }
    return value;
}

// "ELECTRONIC COMPUTERS [3571]" -> "3571"; "3711" -> "3711".
std::optional<std::string> parse_sic(std::string_view value)
{
    std::string_view digits;
    for (std::size_t i = 0; i < value.size();) {
        if (value[i] >= '0' && value[i] <= '9') {
            auto j = i;
            while (j < value.size() && value[j] >= '0' && value[j] <= '9') {
                ++j;
            }
            digits = value.substr(i, j - i);
            i = j;
        } else {
            ++i;
        }
    }
    if (digits.empty() || digits.size() > 4) {
        return std::nullopt;
    }
    return std::string(4 - digits.size(), '0') + std::string(digits);
}

struct TagLine {
    std::string name;
    std::string_view value;
};

// "<TAG>value" or "NAME: value". Closing tags and bare text yield nothing.
std::optional<TagLine> split_tag_line(std::string_view line)
{
    line = trim(line);
    if (line.empty()) {
        return std::nullopt;
    }
    if (line.front() == '<') {
        if (line.size() > 1 && line[1] == '/') {
            return std::nullopt;
        }
        const auto close = line.find('>');
        if (close == std::string_view::npos || close == 1) {
            return std::nullopt;
        }
        return TagLine{to_upper_ascii(trim(line.substr(1, close - 1))), trim(line.substr(close + 1))};
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos || colon == 0) {
        return std::nullopt;
    }
    return TagLine{to_upper_ascii(trim(line.substr(0, colon))), trim(line.substr(colon + 1))};
}

struct HeaderSpan {
    std::size_t begin = std::string_view::npos;
    std::size_t end = 0;
};

HeaderSpan locate_header(std::string_view raw)
{
    HeaderSpan span;
    for (std::string_view tag : {"<SEC-HEADER>", "<IMS-HEADER>"}) {
        const auto pos = find_line_tag(raw, tag);
        if (pos < span.begin) {
            span.begin = pos;
        }
    }
    if (span.begin == std::string_view::npos) {
        return span;
    }
    const bool ims = raw.substr(span.begin, 5) == "<IMS-";
    const auto close = find_line_tag(raw, ims ? "</IMS-HEADER>" : "</SEC-HEADER>", span.begin);
    const auto doc = find_line_tag(raw, "<DOCUMENT>", span.begin);
    span.end = std::min({close, doc, raw.size()});
    return span;
}

bool is_deletion_marker(std::string_view key)
{
    const auto upper = to_upper_ascii(key);
    return upper.find("DELET") != std::string::npos || upper.find("WITHDRAW") != std::string::npos;
}

} // namespace

bool is_accession_number(std::string_view text) noexcept
{
    if (text.size() != 20 || text[10] != '-' || text[13] != '-') {
        return false;
    }
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (i == 10 || i == 13) {
            continue;
        }
        if (text[i] < '0' || text[i] > '9') {
            return false;
        }
    }
    return true;
}

std::optional<std::string> accession_from_path(std::string_view edgar_path)
{
    const auto slash = edgar_path.rfind('/');
    auto name = slash == std::string_view::npos ? edgar_path : edgar_path.substr(slash + 1);
    const auto dot = name.rfind('.');
    if (dot != std::string_view::npos) {
        name = name.substr(0, dot);
    }
    if (!is_accession_number(name)) {
        return std::nullopt;
    }
    return std::string(name);
}

FilingHeader parse_header(std::string_view text)
{
    FilingHeader header;
    const auto start = text.find_first_not_of(" \t\r\n");
    if (start != std::string_view::npos && text.substr(start, 12) == "<IMS-HEADER>") {
        header.header_kind = HeaderKind::ims_header;
    }

    bool seen[7] = {};
    bool first_line = true;
    for_each_line(text, [&](std::string_view line, std::size_t) {
        if (first_line) {
            // The opening tag line ("<SEC-HEADER>0000.hdr.sgml : 20180102") carries no field.
            first_line = false;
            const auto t = trim(line);
            if (t.substr(0, 12) == "<SEC-HEADER>" || t.substr(0, 12) == "<IMS-HEADER>") {
                return true;
            }
        }
        auto tag = split_tag_line(line);
        if (!tag || tag->value.empty() || tag->name == "SEC-HEADER" || tag->name == "IMS-HEADER") {
            return true;
        }
        const auto value = std::string(tag->value);
        const auto known = header_fields().find(tag->name);
        bool consumed = false;
        if (known != header_fields().end() && !seen[static_cast<int>(known->second)]) {
            switch (known->second) {
            case HeaderField::accession:
                if (is_accession_number(tag->value)) {
                    header.accession_number = value;
                    consumed = true;
                }
                break;
            case HeaderField::form_type:
                header.form_type = to_upper_ascii(tag->value);
                consumed = true;
                break;
            case HeaderField::company_name:
                header.company_name = value;
                consumed = true;
                break;
            case HeaderField::cik:
                if (auto cik = parse_positive(tag->value)) {
                    header.cik = cik;
                    consumed = true;
                }
                break;
            case HeaderField::sic:
                if (auto sic = parse_sic(tag->value)) {
                    header.sic = sic;
                    consumed = true;
                }
                break;
            case HeaderField::date_filed:
                if (auto date = parse_flexible_date(tag->value)) {
                    header.date_filed = date;
                    consumed = true;
                }
                break;
            case HeaderField::period:
                if (auto date = parse_flexible_date(tag->value)) {
                    header.period = date;
                    consumed = true;
                }
                break;
            }
            if (consumed) {
                seen[static_cast<int>(known->second)] = true;
            }
        }
        if (!consumed) {
            header.extra.emplace_back(tag->name, value);
        }
        return true;
    });

    if (header.accession_number.empty()) {
        throw Error(ErrorCode::MissingAccession, "header has no well-formed accession number");
    }
    return header;
}

ParsedDocument parse_document(std::string_view segment, std::uint32_t position, std::vector<ParseWarning>& warnings)
{
    const std::string location = "document " + std::to_string(position);
    if (find_line_tag(segment, "<DOCUMENT>") == 0) {
        segment.remove_prefix(after_line(segment, 0));
    }
    if (const auto close = find_line_tag(segment, "</DOCUMENT>"); close != std::string_view::npos) {
        segment = segment.substr(0, close);
    }

    ParsedDocument doc;
    const auto text_open = find_line_tag(segment, "<TEXT>");
    const auto meta_end = text_open == std::string_view::npos ? segment.size() : text_open;

    std::optional<std::string> sequence_text;
    for_each_line(segment.substr(0, meta_end), [&](std::string_view line, std::size_t) {
        auto tag = split_tag_line(line);
        if (!tag || trim(line).front() != '<') {
            return true;
        }
        const auto value = std::string(tag->value);
        if (tag->name == "TYPE" && !doc.doc_type) {
            doc.doc_type = value;
        } else if (tag->name == "SEQUENCE" && !sequence_text) {
            sequence_text = value;
        } else if (tag->name == "FILENAME" && !doc.filename) {
            doc.filename = value;
        } else if (tag->name == "DESCRIPTION" && !doc.description) {
            doc.description = value;
        }
        return true;
    });

    if (text_open == std::string_view::npos) {
        warnings.push_back({location, "no TEXT region"});
    } else {
        auto body_start = text_open + 6;
        std::string_view region = segment.substr(body_start);
        std::size_t close = std::string_view::npos;
        for (auto hit : find_line_tags(region, "</TEXT>")) {
            close = hit;
        }
        if (close == std::string_view::npos) {
            warnings.push_back({location, "unclosed TEXT region"});
        } else {
            region = region.substr(0, close);
        }
        if (region.substr(0, 2) == "\r\n") {
            region.remove_prefix(2);
        } else if (region.substr(0, 1) == "\n") {
            region.remove_prefix(1);
        }
        if (region.size() >= 2 && region.substr(region.size() - 2) == "\r\n") {
            region.remove_suffix(2);
        } else if (!region.empty() && region.back() == '\n') {
            region.remove_suffix(1);
        }
        if (looks_uuencoded(region)) {
            std::vector<std::string> uu_warnings;
            doc.body = uudecode(region, &uu_warnings);
            doc.was_uuencoded = true;
            for (auto& w : uu_warnings) {
                warnings.push_back({location, "uuencode: " + w});
            }
        } else {
            doc.body = std::string(region);
        }
    }

    const auto sequence = sequence_text ? parse_positive(*sequence_text) : std::nullopt;
    if (sequence && *sequence <= 0xFFFFFFFFULL) {
        doc.sequence = static_cast<std::uint32_t>(*sequence);
    } else {
        if (position == 0) {
            throw Error(ErrorCode::InvalidArgument, "document has no SEQUENCE and no position");
        }
        doc.sequence = position;
        warnings.push_back({location, sequence_text ? "invalid SEQUENCE '" + *sequence_text + "'; assigned by position"
                                                    : "missing SEQUENCE; assigned by position"});
    }

    doc.content_type =
        detect_content_type(doc.body, doc.filename ? std::optional<std::string_view>(*doc.filename) : std::nullopt);
    doc.sha1 = sha1_hex(doc.body);
    return doc;
}

ParsedDocument parse_document(std::string_view segment)
{
    std::vector<ParseWarning> ignored;
    return parse_document(segment, 1, ignored);
}

ParsedFiling parse_filing(std::string_view raw)
{
    ParsedFiling filing;
    const auto header_span = locate_header(raw);
    const auto opens = find_line_tags(raw, "<DOCUMENT>");

    if (header_span.begin == std::string_view::npos && opens.empty()) {
        throw Error(ErrorCode::NotAFiling, "no header tag and no DOCUMENT tag");
    }

    if (header_span.begin == std::string_view::npos) {
        filing.warnings.push_back({"header", std::string(kHeaderMissing)});
    } else {
        const auto header_text = decode_text(raw.substr(header_span.begin, header_span.end - header_span.begin));
        try {
            filing.header = parse_header(header_text);
            for (const auto& [key, value] : filing.header->extra) {
                if (is_deletion_marker(key)) {
                    filing.warnings.push_back({"header", "removal marker " + key + ": " + value});
                }
            }
        } catch (const Error& e) {
            filing.warnings.push_back({"header", std::string(to_string(e.code())) + ": " + e.what()});
        }
    }

    for (std::size_t k = 0; k < opens.size(); ++k) {
        const auto position = static_cast<std::uint32_t>(k + 1);
        const auto next_open = k + 1 < opens.size() ? opens[k + 1] : raw.size();
        const auto close = find_line_tag(raw, "</DOCUMENT>", opens[k]);
        std::string_view segment;
        if (close != std::string_view::npos && close < next_open) {
            segment = raw.substr(opens[k], after_line(raw, close) - opens[k]);
        } else {
            segment = raw.substr(opens[k], next_open - opens[k]);
            filing.warnings.push_back({"document " + std::to_string(position), "unclosed DOCUMENT tag"});
        }
        try {
            filing.documents.push_back(parse_document(segment, position, filing.warnings));
        } catch (const Error& e) {
            filing.warnings.push_back(
                {"document " + std::to_string(position), std::string(kUnparseableDocument) + ": " + e.what()});
        }
    }

    std::map<std::uint32_t, std::size_t> seen;
    for (const auto& doc : filing.documents) {
        if (++seen[doc.sequence] == 2) {
            filing.warnings.push_back({"document sequence " + std::to_string(doc.sequence), "duplicate sequence number"});
        }
    }
    return filing;
}

std::string to_audit_dump(const ParsedFiling& filing)
{
    std::string out;
    const auto field = [&](std::string_view name, std::string_view value) {
        out += "  ";
        out += name;
        out += ": ";
        out += value;
        out += '\n';
    };
    if (filing.header) {
        const auto& h = *filing.header;
        out += "header: ";
        out += to_string(h.header_kind);
        out += '\n';
        field("accession_number", h.accession_number);
        field("cik", h.cik ? std::to_string(*h.cik) : "-");
        field("company_name", h.company_name);
        field("form_type", h.form_type);
        field("sic", h.sic.value_or("-"));
        field("date_filed", h.date_filed ? to_iso(*h.date_filed) : "-");
        field("period", h.period ? to_iso(*h.period) : "-");
        for (const auto& [key, value] : h.extra) {
            field("extra " + key, value);
        }
    } else {
        out += "header: none\n";
    }
    out += "documents: " + std::to_string(filing.documents.size()) + '\n';
    for (const auto& d : filing.documents) {
        out += "  [" + std::to_string(d.sequence) + "] type=" + d.doc_type.value_or("-") +
               " filename=" + d.filename.value_or("-") + " content_type=" + d.content_type +
               " uuencoded=" + (d.was_uuencoded ? "yes" : "no") + " bytes=" + std::to_string(d.body.size()) +
               " sha1=" + d.sha1 + '\n';
        if (d.description) {
            out += "      description: " + *d.description + '\n';
        }
    }
    out += "warnings: " + std::to_string(filing.warnings.size()) + '\n';
    for (const auto& w : filing.warnings) {
        field(w.location, w.message);
    }
    return out;
}

} // namespace edgar
