#include "edgar/uucodec.hpp"

#include "edgar/error.hpp"

namespace edgar {

namespace {

std::string_view strip_cr(std::string_view line)
{
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    return line;
}

std::string_view rtrim(std::string_view line)
{
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
        line.remove_suffix(1);
    }
    return line;
}

bool is_blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

// ^begin [0-7]{3,4} \S
bool is_begin_line(std::string_view line)
{
    constexpr std::string_view prefix = "begin ";
    if (line.substr(0, prefix.size()) != prefix) {
        return false;
    }
    std::size_t pos = prefix.size();
    std::size_t digits = 0;
    while (pos < line.size() && line[pos] >= '0' && line[pos] <= '7') {
        ++pos;
        ++digits;
    }
    if (digits < 3 || digits > 4 || pos >= line.size() || line[pos] != ' ') {
        return false;
    }
    ++pos;
    return pos < line.size() && line[pos] != ' ' && line[pos] != '\t' && line[pos] != '\r' && line[pos] != '\n';
}

// A lone "<PDF>"-style wrapper line that some filings put around the payload.
bool is_wrapper_tag(std::string_view line)
{
    line = rtrim(line);
    if (line.size() < 3 || line.front() != '<' || line.back() != '>') {
        return false;
    }
    for (char c : line.substr(1, line.size() - 2)) {
        if (!((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'))) {
            return false;
        }
    }
    return true;
}

class LineReader {
public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(std::string_view& line)
    {
        if (pos_ >= text_.size()) {
            return false;
        }
        auto end = text_.find('\n', pos_);
        if (end == std::string_view::npos) {
            end = text_.size();
        }
        line = strip_cr(text_.substr(pos_, end - pos_));
        pos_ = end + 1;
        ++number_;
        return true;
    }

    std::size_t number() const noexcept { return number_; }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t number_ = 0;
};

void warn(std::vector<std::string>* warnings, std::string message)
{
    if (warnings) {
        warnings->push_back(std::move(message));
    }
}

char encode_sextet(unsigned value) { return value == 0 ? '`' : static_cast<char>(value + 0x20); }

unsigned decode_sextet(char c) { return (static_cast<unsigned char>(c) - 0x20U) & 0x3FU; }

} // namespace

bool looks_uuencoded(std::string_view text) noexcept
{
    LineReader reader(text);
    std::string_view line;
    bool wrapper_seen = false;
    while (reader.next(line)) {
        if (is_blank(line)) {
            continue;
        }
        if (!wrapper_seen && is_wrapper_tag(line)) {
            wrapper_seen = true;
            continue;
        }
        return is_begin_line(line);
    }
    return false;
}

std::string uudecode(std::string_view text, std::vector<std::string>* warnings)
{
    LineReader reader(text);
    std::string_view line;
    bool begun = false;
    while (reader.next(line)) {
        if (is_begin_line(line)) {
            begun = true;
            break;
        }
    }
    if (!begun) {
        throw Error(ErrorCode::MalformedUuencode, "no begin line");
    }

    std::string out;
    bool ended = false;
    while (reader.next(line)) {
        if (rtrim(line) == "end") {
            ended = true;
            break;
        }
        if (is_blank(line)) {
            continue;
        }
        const auto lead = static_cast<unsigned char>(line.front());
        if (lead < 0x20 || lead > 0x60) {
            warn(warnings, "line " + std::to_string(reader.number()) + ": trailing junk before end");
            break;
        }
        const std::size_t count = decode_sextet(line.front());
        if (count == 0) {
            continue;
        }
        std::string encoded(line.substr(1));
        const std::size_t needed = (4 * count + 2) / 3;
        const std::size_t full = (count + 2) / 3 * 4;
        if (encoded.size() < needed) {
            if (full - encoded.size() > 4) {
                throw Error(ErrorCode::MalformedUuencode, "line " + std::to_string(reader.number()) + " declares " +
                                                              std::to_string(count) + " bytes but has " +
                                                              std::to_string(encoded.size()) + " characters");
            }
            warn(warnings, "line " + std::to_string(reader.number()) + ": short line padded");
        }
        if (encoded.size() < full) {
            encoded.append(full - encoded.size(), '`');
        }
        std::size_t produced = 0;
        for (std::size_t i = 0; i + 3 < encoded.size() && produced < count; i += 4) {
            const unsigned a = decode_sextet(encoded[i]);
            const unsigned b = decode_sextet(encoded[i + 1]);
            const unsigned c = decode_sextet(encoded[i + 2]);
            const unsigned d = decode_sextet(encoded[i + 3]);
            const char bytes[3] = {static_cast<char>((a << 2) | (b >> 4)), static_cast<char>(((b & 0xF) << 4) | (c >> 2)),
                                   static_cast<char>(((c & 0x3) << 6) | d)};
            for (char byte : bytes) {
                if (produced < count) {
                    out.push_back(byte);
                    ++produced;
                }
            }
        }
    }
    if (!ended) {
        warn(warnings, "missing end line");
        return out;
    }
    while (reader.next(line)) {
        if (!is_blank(line) && !is_wrapper_tag(line)) {
            warn(warnings, "line " + std::to_string(reader.number()) + ": trailing data after end");
            break;
        }
    }
    return out;
}

std::string uuencode(std::string_view data, std::string_view file_name, std::string_view mode)
{
    std::string out;
    out.reserve(data.size() * 4 / 3 + data.size() / 45 * 2 + 64);
    out += "begin ";
    out += mode;
    out += ' ';
    out += file_name;
    out += '\n';
    for (std::size_t pos = 0; pos < data.size(); pos += 45) {
        const auto chunk = data.substr(pos, 45);
        out.push_back(encode_sextet(static_cast<unsigned>(chunk.size())));
        for (std::size_t i = 0; i < chunk.size(); i += 3) {
            unsigned char b[3] = {0, 0, 0};
            for (std::size_t k = 0; k < 3 && i + k < chunk.size(); ++k) {
                b[k] = static_cast<unsigned char>(chunk[i + k]);
            }
            out.push_back(encode_sextet(b[0] >> 2));
            out.push_back(encode_sextet(((b[0] & 0x3U) << 4) | (b[1] >> 4)));
            out.push_back(encode_sextet(((b[1] & 0xFU) << 2) | (b[2] >> 6)));
            out.push_back(encode_sextet(b[2] & 0x3FU));
        }
        out.push_back('\n');
    }
    out += "`\nend\n";
    return out;
}

} // namespace edgar
