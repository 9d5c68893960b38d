#include "edgar/mock/mock_edgar_server.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "range_clamp.hpp"

#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace edgar::mock {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultThrottlePage =
    "<html><head><title>SEC.gov | Request Rate Threshold Exceeded</title></head>\n"
    "<body><h1>Request Rate Threshold Exceeded</h1>\n"
    "<p>Your request rate has exceeded the fair access limit.</p></body></html>\n";

std::string read_all(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

std::string content_type_for(const fs::path& path)
{
    const auto ext = path.extension().string();
    if (ext == ".json") {
        return "application/json";
    }
    if (ext == ".idx" || ext == ".txt" || ext == ".nc") {
        return "text/plain";
    }
    return "application/octet-stream";
}

} // namespace

struct MockEdgarServer::State {
    fs::path root;
    std::optional<fs::path> overlay;
    httplib::Server server;
    std::thread thread;
    int port = 0;

    mutable std::mutex mutex;
    int fail_remaining = 0;
    int fail_status = 500;
    int throttle_remaining = 0;
    bool throttle_always = false;
    int truncate_remaining = 0;
    std::string throttle_page = kDefaultThrottlePage;
    std::vector<std::string> log;

    std::optional<fs::path> resolve(const std::string& area, const std::string& rest) const
    {
        if (rest.empty() || rest.find("..") != std::string::npos) {
            return std::nullopt;
        }
        std::vector<fs::path> bases;
        if (overlay) {
            bases.push_back(*overlay / area);
        }
        bases.push_back(root / area);
        for (const auto& base : bases) {
            const auto candidate = base / rest;
            std::error_code ec;
            if (fs::is_regular_file(candidate, ec)) {
                return candidate;
            }
        }
        return std::nullopt;
    }

    void handle(const httplib::Request& req, httplib::Response& res)
    {
        bool truncate = false;
        std::optional<fs::path> file;
        {
            std::lock_guard lock(mutex);
            log.push_back(req.method + " " + req.path);
            if (fail_remaining > 0) {
                --fail_remaining;
                res.status = fail_status;
                return;
            }
            if (throttle_always || throttle_remaining > 0) {
                if (throttle_remaining > 0) {
                    --throttle_remaining;
                }
                res.status = 200;
                res.set_content(throttle_page, "text/html");
                return;
            }
            const std::string area = req.matches[1] == "Archives" ? "archives" : "metadata";
            file = resolve(area, req.matches[2]);
            if (file && truncate_remaining > 0) {
                --truncate_remaining;
                truncate = true;
            }
        }
        if (!file) {
            res.status = 404;
            res.set_content("<html><body><h1>Not Found</h1></body></html>", "text/html");
            return;
        }
        auto data = std::make_shared<std::string>(read_all(*file));
        if (truncate && data->size() > 1) {
            res.set_content_provider(data->size(), content_type_for(*file),
                                     [data](std::size_t offset, std::size_t, httplib::DataSink& sink) {
                                         if (offset == 0) {
                                             sink.write(data->data(), data->size() / 2);
                                         }
                                         return false;
                                     });
            return;
        }
        clamp_ranges(req, data->size());
        res.set_content(*data, content_type_for(*file));
    }
};

MockEdgarServer::MockEdgarServer(fs::path root) : state_(std::make_unique<State>())
{
    state_->root = std::move(root);
    const auto page = state_->root / "throttle.html";
    if (fs::is_regular_file(page)) {
        state_->throttle_page = read_all(page);
    }
    state_->server.Get(R"(/(Archives|metadata)/(.*))",
                       [this](const httplib::Request& req, httplib::Response& res) { state_->handle(req, res); });
}

MockEdgarServer::~MockEdgarServer() { stop(); }

int MockEdgarServer::start(int port)
{
    if (state_->thread.joinable()) {
        return state_->port;
    }
    if (port == 0) {
        state_->port = state_->server.bind_to_any_port("127.0.0.1");
    } else {
        state_->port = state_->server.bind_to_port("127.0.0.1", port) ? port : -1;
    }
    if (state_->port <= 0) {
        throw std::runtime_error("mock EDGAR server could not bind a port");
    }
    state_->thread = std::thread([this] { state_->server.listen_after_bind(); });
    state_->server.wait_until_ready();
    return state_->port;
}

void MockEdgarServer::stop()
{
    if (state_->thread.joinable()) {
        state_->server.stop();
        state_->thread.join();
    }
}

std::string MockEdgarServer::base_url() const
{
    return "http://127.0.0.1:" + std::to_string(state_->port) + "/Archives";
}

std::string MockEdgarServer::metadata_base_url() const
{
    return "http://127.0.0.1:" + std::to_string(state_->port) + "/metadata";
}

void MockEdgarServer::set_overlay(std::optional<fs::path> overlay)
{
    std::lock_guard lock(state_->mutex);
    state_->overlay = std::move(overlay);
}

void MockEdgarServer::fail_next(int n, int status)
{
    std::lock_guard lock(state_->mutex);
    state_->fail_remaining = n;
    state_->fail_status = status;
}

void MockEdgarServer::throttle_next(int n)
{
    std::lock_guard lock(state_->mutex);
    state_->throttle_remaining = n;
}

void MockEdgarServer::throttle_all(bool on)
{
    std::lock_guard lock(state_->mutex);
    state_->throttle_always = on;
}

void MockEdgarServer::truncate_next(int n)
{
    std::lock_guard lock(state_->mutex);
    state_->truncate_remaining = n;
}

void MockEdgarServer::set_throttle_page(std::string body)
{
    std::lock_guard lock(state_->mutex);
    state_->throttle_page = std::move(body);
}

std::vector<std::string> MockEdgarServer::request_log() const
{
    std::lock_guard lock(state_->mutex);
    return state_->log;
}

std::size_t MockEdgarServer::request_count() const
{
    std::lock_guard lock(state_->mutex);
    return state_->log.size();
}

void MockEdgarServer::clear_log()
{
    std::lock_guard lock(state_->mutex);
    state_->log.clear();
}

} // namespace edgar::mock
