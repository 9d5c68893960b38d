#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace edgar {

using HeaderList = std::vector<std::pair<std::string, std::string>>;

struct HttpRequest {
    std::string method = "GET";
    std::string url;
    HeaderList headers;
    std::string body;
};

struct HttpResponse {
    int status = 0;
    std::string body;
    HeaderList headers;

    /// Case-insensitive header lookup.
    std::optional<std::string> header(std::string_view name) const;
};

/// Minimal blocking HTTP seam. Implementations throw Error(Transport) when no
/// response could be obtained (connection refused, timeout, truncated body).
class HttpTransport {
public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport; safe to share between threads.
std::shared_ptr<HttpTransport> make_http_transport(std::chrono::milliseconds timeout = std::chrono::seconds(30));

struct UrlParts {
    std::string scheme;
    std::string host;
    int port = 0;
    std::string path;   // begins with "/", includes any query string
};

/// Throws InvalidArgument for anything that is not http(s)://host[:port][/path].
UrlParts parse_url(std::string_view url);

/// Joins a base URL and a relative path with exactly one "/" between them.
std::string join_url(std::string_view base, std::string_view path);

/// RFC 3986 percent-encoding; '/' is kept when `keep_slash` is set.
std::string url_encode(std::string_view text, bool keep_slash = false);

} // namespace edgar
