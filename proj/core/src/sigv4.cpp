#include "edgar/sigv4.hpp"

#include <algorithm>
#include <ctime>

#include "edgar/digest.hpp"
#include "edgar/http_transport.hpp"
#include "edgar/text_codec.hpp"

namespace edgar::sigv4 {

namespace {

std::string collapse_spaces(std::string_view value)
{
    value = trim(value);
    std::string out;
    bool space = false;
    for (char c : value) {
        if (c == ' ' || c == '\t') {
            space = true;
            continue;
        }
        if (space && !out.empty()) {
            out.push_back(' ');
        }
        space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> canonical_headers(const SignedRequest& request)
{
    std::vector<std::pair<std::string, std::string>> headers;
    for (const auto& [name, value] : request.headers) {
        headers.emplace_back(to_lower_ascii(name), collapse_spaces(value));
    }
    std::sort(headers.begin(), headers.end());
    return headers;
}

std::string signed_header_names(const SignedRequest& request)
{
    std::string names;
    for (const auto& [name, value] : canonical_headers(request)) {
        if (!names.empty()) {
            names.push_back(';');
        }
        names += name;
    }
    return names;
}

std::string scope(const SignedRequest& request, const Credentials& credentials)
{
    return request.amz_date.substr(0, 8) + "/" + credentials.region + "/" + credentials.service + "/aws4_request";
}

} // namespace

std::string canonical_request(const SignedRequest& request)
{
    std::vector<std::pair<std::string, std::string>> query;
    for (const auto& [key, value] : request.query) {
        query.emplace_back(url_encode(key), url_encode(value));
    }
    std::sort(query.begin(), query.end());

    std::string out = request.method + "\n" + request.canonical_uri + "\n";
    for (std::size_t i = 0; i < query.size(); ++i) {
        if (i > 0) {
            out.push_back('&');
        }
        out += query[i].first + "=" + query[i].second;
    }
    out.push_back('\n');
    for (const auto& [name, value] : canonical_headers(request)) {
        out += name + ":" + value + "\n";
    }
    out.push_back('\n');
    out += signed_header_names(request);
    out.push_back('\n');
    out += request.payload_sha256;
    return out;
}

std::string string_to_sign(const SignedRequest& request, const Credentials& credentials)
{
    return "AWS4-HMAC-SHA256\n" + request.amz_date + "\n" + scope(request, credentials) + "\n" +
           sha256_hex(canonical_request(request));
}

std::string signature(const SignedRequest& request, const Credentials& credentials)
{
    auto key = hmac_sha256("AWS4" + credentials.secret_key, request.amz_date.substr(0, 8));
    key = hmac_sha256(key, credentials.region);
    key = hmac_sha256(key, credentials.service);
    key = hmac_sha256(key, "aws4_request");
    return to_hex(hmac_sha256(key, string_to_sign(request, credentials)));
}

std::string authorization(const SignedRequest& request, const Credentials& credentials)
{
    return "AWS4-HMAC-SHA256 Credential=" + credentials.access_key + "/" + scope(request, credentials) +
           ",SignedHeaders=" + signed_header_names(request) + ",Signature=" + signature(request, credentials);
}

std::string amz_now()
{
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buffer[17];
    std::strftime(buffer, sizeof buffer, "%Y%m%dT%H%M%SZ", &utc);
    return buffer;
}

} // namespace edgar::sigv4
