#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace edgar::sigv4 {

struct Credentials {
    std::string access_key;
    std::string secret_key;
    std::string region;
    std::string service = "s3";
};

struct SignedRequest {
    std::string method;
    std::string canonical_uri;   // already percent-encoded path
    std::vector<std::pair<std::string, std::string>> query;   // unencoded
    std::vector<std::pair<std::string, std::string>> headers; // to sign; names any case
    std::string payload_sha256;  // hex
    std::string amz_date;        // YYYYMMDD'T'HHMMSS'Z'
};

std::string canonical_request(const SignedRequest& request);
std::string string_to_sign(const SignedRequest& request, const Credentials& credentials);
std::string signature(const SignedRequest& request, const Credentials& credentials);

/// Full Authorization header value.
std::string authorization(const SignedRequest& request, const Credentials& credentials);

/// Current UTC time as YYYYMMDD'T'HHMMSS'Z'.
std::string amz_now();

} // namespace edgar::sigv4
