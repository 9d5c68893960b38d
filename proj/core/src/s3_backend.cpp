#include <algorithm>
#include <charconv>
#include <deque>

#include "edgar/digest.hpp"
#include "edgar/error.hpp"
#include "edgar/object_store.hpp"
#include "edgar/sigv4.hpp"

namespace edgar {

namespace {

constexpr std::string_view kMetaCompressed = "x-amz-meta-edgar-compressed";
constexpr std::string_view kMetaStoredLength = "x-amz-meta-edgar-stored-length";
constexpr std::string_view kMetaLogicalLength = "x-amz-meta-edgar-logical-length";
constexpr std::string_view kMetaSha1 = "x-amz-meta-edgar-sha1";

std::string xml_unescape(std::string_view text)
{
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '&') {
            out.push_back(text[i]);
            continue;
        }
        const auto semi = text.find(';', i);
        if (semi == std::string_view::npos) {
            out.push_back('&');
            continue;
        }
        const auto entity = text.substr(i + 1, semi - i - 1);
        if (entity == "amp") {
            out.push_back('&');
        } else if (entity == "lt") {
            out.push_back('<');
        } else if (entity == "gt") {
            out.push_back('>');
        } else if (entity == "quot") {
            out.push_back('"');
        } else if (entity == "apos") {
            out.push_back('\'');
        } else {
            out.append(text.substr(i, semi - i + 1));
        }
        i = semi;
    }
    return out;
}

std::vector<std::string> xml_values(std::string_view xml, std::string_view tag)
{
    std::vector<std::string> values;
    const std::string open = "<" + std::string(tag) + ">";
    const std::string close = "</" + std::string(tag) + ">";
    for (auto pos = xml.find(open); pos != std::string_view::npos; pos = xml.find(open, pos)) {
        const auto start = pos + open.size();
        const auto end = xml.find(close, start);
        if (end == std::string_view::npos) {
            break;
        }
        values.push_back(xml_unescape(xml.substr(start, end - start)));
        pos = end + close.size();
    }
    return values;
}

std::uint64_t parse_u64(const std::optional<std::string>& text, std::string_view what)
{
    std::uint64_t value = 0;
    if (!text || std::from_chars(text->data(), text->data() + text->size(), value).ec != std::errc{}) {
        throw Error(ErrorCode::CorruptObject, "object header " + std::string(what) + " is missing or invalid");
    }
    return value;
}

class S3Backend;

class S3Cursor final : public KeyCursor {
public:
    S3Cursor(S3Backend& backend, std::string prefix) : backend_(backend), prefix_(std::move(prefix)) {}
    std::optional<std::string> next() override;

private:
    S3Backend& backend_;
    std::string prefix_;
    std::deque<std::string> page_;
    std::optional<std::string> token_;
    bool done_ = false;
};

class S3Backend final : public StorageBackend {
public:
    S3Backend(S3Config config, std::shared_ptr<HttpTransport> transport)
        : config_(std::move(config)), transport_(std::move(transport))
    {
        if (!transport_) {
            throw Error(ErrorCode::InvalidArgument, "S3 backend needs a transport");
        }
        if (config_.bucket.empty()) {
            throw Error(ErrorCode::InvalidConfig, "s3.bucket is required");
        }
        if (config_.page_size <= 0) {
            throw Error(ErrorCode::InvalidConfig, "s3.page_size must be positive");
        }
        const auto url = parse_url(config_.endpoint);
        host_ = url.host;
        const bool default_port = (url.scheme == "http" && url.port == 80) || (url.scheme == "https" && url.port == 443);
        if (!default_port) {
            host_ += ":" + std::to_string(url.port);
        }
        base_ = url.scheme + "://" + host_;
    }

    void write(const std::string& key, std::string_view stored, const ObjectMeta& meta) override
    {
        HeaderList extra = {
            {"content-type", "application/octet-stream"},
            {std::string(kMetaCompressed), meta.compressed ? "1" : "0"},
            {std::string(kMetaStoredLength), std::to_string(meta.stored_length)},
            {std::string(kMetaLogicalLength), std::to_string(meta.logical_length)},
            {std::string(kMetaSha1), meta.sha1},
        };
        const auto response = send("PUT", object_path(key), {}, std::move(extra), std::string(stored));
        if (response.status != 200) {
            fail(response, "PUT " + key);
        }
    }

    std::optional<ObjectMeta> head(const std::string& key) override
    {
        const auto response = send("HEAD", object_path(key), {}, {}, {});
        if (response.status == 404) {
            return std::nullopt;
        }
        if (response.status != 200) {
            fail(response, "HEAD " + key);
        }
        ObjectMeta meta;
        meta.compressed = response.header(kMetaCompressed).value_or("0") == "1";
        meta.logical_length = parse_u64(response.header(kMetaLogicalLength), kMetaLogicalLength);
        auto stored = response.header(kMetaStoredLength);
        if (!stored) {
            stored = response.header("content-length");
        }
        meta.stored_length = parse_u64(stored, "content-length");
        meta.sha1 = response.header(kMetaSha1).value_or("");
        return meta;
    }

    std::optional<std::string> read(const std::string& key, std::optional<ByteRange> range) override
    {
        HeaderList extra;
        if (range) {
            require_valid(*range);
            extra.emplace_back("range", "bytes=" + std::to_string(range->begin) + "-" + std::to_string(range->end - 1));
        }
        auto response = send("GET", object_path(key), {}, std::move(extra), {});
        if (response.status == 404) {
            return std::nullopt;
        }
        if (range && response.status == 416) {
            return std::string();
        }
        if (range && response.status == 206) {
            if (response.body.size() > range->length()) {
                response.body.resize(range->length());
            }
            return std::move(response.body);
        }
        if (response.status != 200) {
            fail(response, "GET " + key);
        }
        return range ? slice(response.body, *range) : std::move(response.body);
    }

    bool remove(const std::string& key) override
    {
        if (!head(key)) {
            return false;
        }
        const auto response = send("DELETE", object_path(key), {}, {}, {});
        if (response.status != 204 && response.status != 200 && response.status != 404) {
            fail(response, "DELETE " + key);
        }
        return response.status != 404;
    }

    std::unique_ptr<KeyCursor> list(const std::string& prefix) override
    {
        return std::make_unique<S3Cursor>(*this, prefix);
    }

    std::string describe() const override { return "s3:" + base_ + "/" + config_.bucket; }

    // One ListObjectsV2 page: keys plus the continuation token, if any.
    std::pair<std::vector<std::string>, std::optional<std::string>> list_page(const std::string& prefix,
                                                                              const std::optional<std::string>& token)
    {
        std::vector<std::pair<std::string, std::string>> query = {
            {"list-type", "2"}, {"max-keys", std::to_string(config_.page_size)}, {"prefix", prefix}};
        if (token) {
            query.emplace_back("continuation-token", *token);
        }
        const auto response = send("GET", "/" + url_encode(config_.bucket), std::move(query), {}, {});
        if (response.status != 200) {
            fail(response, "LIST " + prefix);
        }
        auto keys = xml_values(response.body, "Key");
        const auto truncated = xml_values(response.body, "IsTruncated");
        const auto next = xml_values(response.body, "NextContinuationToken");
        std::optional<std::string> next_token;
        if (!truncated.empty() && truncated.front() == "true" && !next.empty()) {
            next_token = next.front();
        }
        return {std::move(keys), std::move(next_token)};
    }

private:
    std::string object_path(const std::string& key) const
    {
        return "/" + url_encode(config_.bucket) + "/" + url_encode(key, true);
    }

    HttpResponse send(const std::string& method, const std::string& path,
                      std::vector<std::pair<std::string, std::string>> query, HeaderList extra, std::string body)
    {
        sigv4::SignedRequest signed_request;
        signed_request.method = method;
        signed_request.canonical_uri = path;
        signed_request.query = query;
        signed_request.payload_sha256 = sha256_hex(body);
        signed_request.amz_date = sigv4::amz_now();
        signed_request.headers = {{"host", host_},
                                  {"x-amz-content-sha256", signed_request.payload_sha256},
                                  {"x-amz-date", signed_request.amz_date}};
        for (const auto& header : extra) {
            if (header.first.starts_with("x-amz-")) {
                signed_request.headers.push_back(header);
            }
        }
        const sigv4::Credentials credentials{config_.access_key, config_.secret_key, config_.region, "s3"};

        HttpRequest request;
        request.method = method;
        request.url = base_ + path;
        std::sort(query.begin(), query.end());
        for (std::size_t i = 0; i < query.size(); ++i) {
            request.url += (i == 0 ? "?" : "&") + url_encode(query[i].first) + "=" + url_encode(query[i].second);
        }
        request.headers = std::move(extra);
        request.headers.emplace_back("x-amz-content-sha256", signed_request.payload_sha256);
        request.headers.emplace_back("x-amz-date", signed_request.amz_date);
        request.headers.emplace_back("authorization", sigv4::authorization(signed_request, credentials));
        request.body = std::move(body);
        try {
            return transport_->send(request);
        } catch (const Error& e) {
            throw Error(ErrorCode::BackendUnavailable, std::string("S3 ") + method + " " + path + ": " + e.what());
        }
    }

    [[noreturn]] static void fail(const HttpResponse& response, const std::string& what)
    {
        const auto code = response.status == 403 ? ErrorCode::AccessDenied : ErrorCode::BackendUnavailable;
        throw Error(code, what + " returned HTTP " + std::to_string(response.status));
    }

    S3Config config_;
    std::shared_ptr<HttpTransport> transport_;
    std::string host_;
    std::string base_;
};

std::optional<std::string> S3Cursor::next()
{
    while (page_.empty() && !done_) {
        auto [keys, token] = backend_.list_page(prefix_, token_);
        page_.assign(std::make_move_iterator(keys.begin()), std::make_move_iterator(keys.end()));
        token_ = std::move(token);
        done_ = !token_;
    }
    if (page_.empty()) {
        return std::nullopt;
    }
    auto key = std::move(page_.front());
    page_.pop_front();
    return key;
}

} // namespace

std::unique_ptr<StorageBackend> make_s3_backend(S3Config config, std::shared_ptr<HttpTransport> transport)
{
    return std::make_unique<S3Backend>(std::move(config), std::move(transport));
}

} // namespace edgar
