#include "edgar/mock/s3_emulator.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "range_clamp.hpp"

#include <map>
#include <mutex>
#include <thread>

namespace edgar::mock {

namespace {

struct StoredObject {
    std::string data;
    std::vector<std::pair<std::string, std::string>> meta;
};

std::string xml_escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string lower(std::string text)
{
    for (auto& c : text) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return text;
}

void error(httplib::Response& res, int status, const std::string& code)
{
    res.status = status;
    res.set_content("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<Error><Code>" + code + "</Code></Error>",
                    "application/xml");
}

} // namespace

struct S3Emulator::State {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    mutable std::mutex mutex;
    std::map<std::string, std::map<std::string, StoredObject>> buckets;
    std::size_t requests = 0;
    int fail_remaining = 0;

    // Common gate: counts the request, injects failures, checks for a SigV4 header.
    bool admit(const httplib::Request& req, httplib::Response& res)
    {
        std::lock_guard lock(mutex);
        ++requests;
        if (fail_remaining > 0) {
            --fail_remaining;
            error(res, 503, "SlowDown");
            return false;
        }
        if (req.get_header_value("Authorization").rfind("AWS4-HMAC-SHA256 Credential=", 0) != 0) {
            error(res, 403, "AccessDenied");
            return false;
        }
        return true;
    }
};

S3Emulator::S3Emulator() : state_(std::make_unique<State>())
{
    auto& s = *state_;
    s.server.Put(R"(/([^/]+)/(.+))", [&s](const httplib::Request& req, httplib::Response& res) {
        if (!s.admit(req, res)) {
            return;
        }
        StoredObject object;
        object.data = req.body;
        for (const auto& [name, value] : req.headers) {
            const auto key = lower(name);
            if (key.rfind("x-amz-meta-", 0) == 0) {
                object.meta.emplace_back(key, value);
            }
        }
        std::lock_guard lock(s.mutex);
        s.buckets[req.matches[1]][req.matches[2]] = std::move(object);
        res.status = 200;
    });
    s.server.Get(R"(/([^/]+)/(.+))", [&s](const httplib::Request& req, httplib::Response& res) {
        if (!s.admit(req, res)) {
            return;
        }
        std::lock_guard lock(s.mutex);
        const auto& bucket = s.buckets[req.matches[1]];
        const auto it = bucket.find(req.matches[2]);
        if (it == bucket.end()) {
            error(res, 404, "NoSuchKey");
            return;
        }
        for (const auto& [name, value] : it->second.meta) {
            res.set_header(name, value);
        }
        clamp_ranges(req, it->second.data.size());
        res.set_content(it->second.data, "application/octet-stream");
    });
    s.server.Delete(R"(/([^/]+)/(.+))", [&s](const httplib::Request& req, httplib::Response& res) {
        if (!s.admit(req, res)) {
            return;
        }
        std::lock_guard lock(s.mutex);
        s.buckets[req.matches[1]].erase(req.matches[2]);
        res.status = 204;
    });
    s.server.Get(R"(/([^/]+)/?)", [&s](const httplib::Request& req, httplib::Response& res) {
        if (!s.admit(req, res)) {
            return;
        }
        if (req.get_param_value("list-type") != "2") {
            error(res, 400, "InvalidRequest");
            return;
        }
        const auto prefix = req.get_param_value("prefix");
        const auto token = req.get_param_value("continuation-token");
        std::size_t max_keys = 1000;
        if (req.has_param("max-keys")) {
            max_keys = std::stoul(req.get_param_value("max-keys"));
        }
        std::lock_guard lock(s.mutex);
        const auto& bucket = s.buckets[req.matches[1]];
        auto it = token.empty() ? bucket.lower_bound(prefix) : bucket.upper_bound(token);
        std::string body = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<ListBucketResult>";
        body += "<Name>" + xml_escape(req.matches[1]) + "</Name><Prefix>" + xml_escape(prefix) + "</Prefix>";
        std::size_t count = 0;
        std::string last;
        for (; it != bucket.end() && it->first.rfind(prefix, 0) == 0 && count < max_keys; ++it, ++count) {
            body += "<Contents><Key>" + xml_escape(it->first) + "</Key><Size>" +
                    std::to_string(it->second.data.size()) + "</Size></Contents>";
            last = it->first;
        }
        const bool truncated = it != bucket.end() && it->first.rfind(prefix, 0) == 0;
        body += "<KeyCount>" + std::to_string(count) + "</KeyCount>";
        body += std::string("<IsTruncated>") + (truncated ? "true" : "false") + "</IsTruncated>";
        if (truncated) {
            body += "<NextContinuationToken>" + xml_escape(last) + "</NextContinuationToken>";
        }
        body += "</ListBucketResult>";
        res.set_content(body, "application/xml");
    });
}

S3Emulator::~S3Emulator() { stop(); }

int S3Emulator::start(int port)
{
    if (state_->thread.joinable()) {
        return state_->port;
    }
    state_->port = port == 0 ? state_->server.bind_to_any_port("127.0.0.1")
                             : (state_->server.bind_to_port("127.0.0.1", port) ? port : -1);
    if (state_->port <= 0) {
        throw std::runtime_error("S3 emulator could not bind a port");
    }
    state_->thread = std::thread([this] { state_->server.listen_after_bind(); });
    state_->server.wait_until_ready();
    return state_->port;
}

void S3Emulator::stop()
{
    if (state_->thread.joinable()) {
        state_->server.stop();
        state_->thread.join();
    }
}

std::string S3Emulator::endpoint() const { return "http://127.0.0.1:" + std::to_string(state_->port); }

std::vector<std::string> S3Emulator::keys(const std::string& bucket) const
{
    std::lock_guard lock(state_->mutex);
    std::vector<std::string> out;
    const auto it = state_->buckets.find(bucket);
    if (it != state_->buckets.end()) {
        for (const auto& [key, object] : it->second) {
            out.push_back(key);
        }
    }
    return out;
}

std::size_t S3Emulator::request_count() const
{
    std::lock_guard lock(state_->mutex);
    return state_->requests;
}

void S3Emulator::fail_next(int n)
{
    std::lock_guard lock(state_->mutex);
    state_->fail_remaining = n;
}

} // namespace edgar::mock
