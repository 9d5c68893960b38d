#include "edgar/mock/mock_extraction_service.hpp"

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <mutex>
#include <thread>

namespace edgar::mock {

struct MockExtractionService::State {
    httplib::Server server;
    std::thread thread;
    int port = 0;
    mutable std::mutex mutex;
    bool unavailable = false;
    std::size_t requests = 0;
};

std::string MockExtractionService::printable_runs(const std::string& body)
{
    std::string out;
    std::string run;
    const auto flush = [&] {
        if (run.size() >= 4) {
            if (!out.empty()) {
                out.push_back('\n');
            }
            out += run;
        }
        run.clear();
    };
    for (char c : body) {
        if (c >= 0x20 && c <= 0x7E) {
            run.push_back(c);
        } else {
            flush();
        }
    }
    flush();
    return out;
}

MockExtractionService::MockExtractionService() : state_(std::make_unique<State>())
{
    auto& s = *state_;
    s.server.Put("/extract", [&s](const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard lock(s.mutex);
            ++s.requests;
            if (s.unavailable) {
                res.status = 503;
                return;
            }
        }
        res.set_content(printable_runs(req.body), "text/plain; charset=utf-8");
    });
}

MockExtractionService::~MockExtractionService() { stop(); }

int MockExtractionService::start(int port)
{
    if (state_->thread.joinable()) {
        return state_->port;
    }
    state_->port = port == 0 ? state_->server.bind_to_any_port("127.0.0.1")
                             : (state_->server.bind_to_port("127.0.0.1", port) ? port : -1);
    if (state_->port <= 0) {
        throw std::runtime_error("extraction service could not bind a port");
    }
    state_->thread = std::thread([this] { state_->server.listen_after_bind(); });
    state_->server.wait_until_ready();
    return state_->port;
}

void MockExtractionService::stop()
{
    if (state_->thread.joinable()) {
        state_->server.stop();
        state_->thread.join();
    }
}

std::string MockExtractionService::url() const
{
    return "http://127.0.0.1:" + std::to_string(state_->port) + "/extract";
}

void MockExtractionService::set_unavailable(bool on)
{
    std::lock_guard lock(state_->mutex);
    state_->unavailable = on;
}

std::size_t MockExtractionService::request_count() const
{
    std::lock_guard lock(state_->mutex);
    return state_->requests;
}

} // namespace edgar::mock
