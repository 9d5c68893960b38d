#include "edgar/compression.hpp"

#include <zlib.h>

#include <array>

#include "edgar/error.hpp"

namespace edgar {

bool has_gzip_magic(std::string_view data) noexcept
{
    return data.size() >= 2 && static_cast<unsigned char>(data[0]) == 0x1F &&
           static_cast<unsigned char>(data[1]) == 0x8B;
}

std::string gzip_compress(std::string_view data)
{
    z_stream stream{};
    // 15 window bits + 16 selects the gzip wrapper; deflateInit2 leaves the
    // header mtime at zero unless deflateSetHeader says otherwise.
    if (deflateInit2(&stream, Z_BEST_COMPRESSION, Z_DEFLATED, 15 + 16, 8, Z_DEFAULT_STRATEGY) != Z_OK) {
        throw Error(ErrorCode::CorruptCompression, "deflateInit2 failed");
    }
    std::string out;
    out.resize(deflateBound(&stream, static_cast<uLong>(data.size())) + 32);
    stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    stream.avail_in = static_cast<uInt>(data.size());
    stream.next_out = reinterpret_cast<Bytef*>(out.data());
    stream.avail_out = static_cast<uInt>(out.size());
    const int rc = deflate(&stream, Z_FINISH);
    const auto produced = stream.total_out;
    deflateEnd(&stream);
    if (rc != Z_STREAM_END) {
        throw Error(ErrorCode::CorruptCompression, "deflate did not finish");
    }
    out.resize(produced);
    return out;
}

std::string gzip_decompress(std::string_view data)
{
    if (!has_gzip_magic(data)) {
        throw Error(ErrorCode::CorruptCompression, "missing gzip magic bytes");
    }
    std::string out;
    std::array<char, 64 * 1024> buffer{};
    std::size_t offset = 0;
    while (offset < data.size()) {
        z_stream stream{};
        if (inflateInit2(&stream, 15 + 16) != Z_OK) {
            throw Error(ErrorCode::CorruptCompression, "inflateInit2 failed");
        }
        stream.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data() + offset));
        stream.avail_in = static_cast<uInt>(data.size() - offset);
        int rc = Z_OK;
        while (rc != Z_STREAM_END) {
            stream.next_out = reinterpret_cast<Bytef*>(buffer.data());
            stream.avail_out = static_cast<uInt>(buffer.size());
            rc = inflate(&stream, Z_NO_FLUSH);
            if (rc != Z_OK && rc != Z_STREAM_END) {
                const std::string reason = stream.msg ? stream.msg : "inflate error " + std::to_string(rc);
                inflateEnd(&stream);
                throw Error(ErrorCode::CorruptCompression,
                            rc == Z_BUF_ERROR ? "truncated gzip stream" : "invalid gzip stream: " + reason);
            }
            out.append(buffer.data(), buffer.size() - stream.avail_out);
            if (rc == Z_OK && stream.avail_in == 0 && stream.avail_out != 0) {
                inflateEnd(&stream);
                throw Error(ErrorCode::CorruptCompression, "truncated gzip stream");
            }
        }
        offset += stream.total_in;
        inflateEnd(&stream);
        // Trailing zero padding after the last member is tolerated, anything
        // else must be another member.
        while (offset < data.size() && data[offset] == '\0') {
            ++offset;
        }
        if (offset < data.size() && !has_gzip_magic(data.substr(offset))) {
            throw Error(ErrorCode::CorruptCompression, "trailing garbage after gzip member");
        }
    }
    return out;
}

} // namespace edgar
