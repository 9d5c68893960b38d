#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "edgar/http_transport.hpp"

#include <cctype>

#include "edgar/error.hpp"
#include "edgar/text_codec.hpp"

namespace edgar {

std::optional<std::string> HttpResponse::header(std::string_view name) const
{
    const auto wanted = to_lower_ascii(name);
    for (const auto& [key, value] : headers) {
        if (to_lower_ascii(key) == wanted) {
            return value;
        }
    }
    return std::nullopt;
}

UrlParts parse_url(std::string_view url)
{
    UrlParts parts;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw Error(ErrorCode::InvalidArgument, "URL lacks a scheme: " + std::string(url));
    }
    parts.scheme = to_lower_ascii(url.substr(0, scheme_end));
    if (parts.scheme != "http" && parts.scheme != "https") {
        throw Error(ErrorCode::InvalidArgument, "unsupported URL scheme: " + parts.scheme);
    }
    auto rest = url.substr(scheme_end + 3);
    const auto path_start = rest.find('/');
    std::string_view authority = rest;
    parts.path = "/";
    if (path_start != std::string_view::npos) {
        authority = rest.substr(0, path_start);
        parts.path = std::string(rest.substr(path_start));
    }
    const auto colon = authority.find(':');
    if (colon != std::string_view::npos) {
        const auto port_text = authority.substr(colon + 1);
        int port = 0;
        for (char c : port_text) {
            if (!std::isdigit(static_cast<unsigned char>(c))) {
                throw Error(ErrorCode::InvalidArgument, "bad port in URL: " + std::string(url));
            }
            port = port * 10 + (c - '0');
            if (port > 65535) {
                throw Error(ErrorCode::InvalidArgument, "bad port in URL: " + std::string(url));
            }
        }
        if (port_text.empty()) {
            throw Error(ErrorCode::InvalidArgument, "bad port in URL: " + std::string(url));
        }
        parts.port = port;
        authority = authority.substr(0, colon);
    } else {
        parts.port = parts.scheme == "https" ? 443 : 80;
    }
    if (authority.empty()) {
        throw Error(ErrorCode::InvalidArgument, "URL lacks a host: " + std::string(url));
    }
    parts.host = std::string(authority);
    return parts;
}

std::string join_url(std::string_view base, std::string_view path)
{
    while (!base.empty() && base.back() == '/') {
        base.remove_suffix(1);
    }
    while (!path.empty() && path.front() == '/') {
        path.remove_prefix(1);
    }
    std::string out(base);
    out.push_back('/');
    out.append(path);
    return out;
}

std::string url_encode(std::string_view text, bool keep_slash)
{
    static constexpr char hex[] = "0123456789ABCDEF";
    std::string out;
    out.reserve(text.size());
    for (unsigned char c : text) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || (keep_slash && c == '/')) {
            out.push_back(static_cast<char>(c));
        } else {
            out.push_back('%');
            out.push_back(hex[c >> 4]);
            out.push_back(hex[c & 0x0F]);
        }
    }
    return out;
}

namespace {

class HttplibTransport final : public HttpTransport {
public:
    explicit HttplibTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

    HttpResponse send(const HttpRequest& request) override
    {
        const auto url = parse_url(request.url);
        const auto origin = url.scheme + "://" + url.host + ":" + std::to_string(url.port);
        // httplib::Client is not safe for concurrent use, so each request gets
        // its own; connection reuse is not worth the locking here.
        httplib::Client client(origin);
        const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
        const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - seconds);
        client.set_connection_timeout(seconds.count(), micros.count());
        client.set_read_timeout(seconds.count(), micros.count());
        client.set_write_timeout(seconds.count(), micros.count());
        client.set_follow_location(true);

        httplib::Headers headers;
        std::string content_type = "application/octet-stream";
        for (const auto& [name, value] : request.headers) {
            if (to_lower_ascii(name) == "content-type") {
                content_type = value;
            } else {
                headers.emplace(name, value);
            }
        }

        httplib::Result result{nullptr, httplib::Error::Unknown};
        if (request.method == "GET") {
            result = client.Get(url.path, headers);
        } else if (request.method == "HEAD") {
            result = client.Head(url.path, headers);
        } else if (request.method == "DELETE") {
            result = client.Delete(url.path, headers);
        } else if (request.method == "PUT") {
            result = client.Put(url.path, headers, request.body, content_type);
        } else if (request.method == "POST") {
            result = client.Post(url.path, headers, request.body, content_type);
        } else {
            throw Error(ErrorCode::InvalidArgument, "unsupported HTTP method " + request.method);
        }
        if (!result) {
            throw Error(ErrorCode::Transport,
                        request.method + " " + request.url + " failed: " + httplib::to_string(result.error()));
        }
        HttpResponse response;
        response.status = result->status;
        response.body = std::move(result->body);
        for (const auto& [name, value] : result->headers) {
            response.headers.emplace_back(name, value);
        }
        return response;
    }

private:
    std::chrono::milliseconds timeout_;
};

} // namespace

std::shared_ptr<HttpTransport> make_http_transport(std::chrono::milliseconds timeout)
{
    return std::make_shared<HttplibTransport>(timeout);
}

} // namespace edgar
