#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace edgar::mock {

/// Local stand-in for the EDGAR archive and the company metadata host.
///
/// Files under <root>/archives are served at /Archives/..., files under
/// <root>/metadata at /metadata/.... An overlay directory with the same
/// layout takes precedence when set. Range requests are honoured.
class MockEdgarServer {
public:
    explicit MockEdgarServer(std::filesystem::path root);
    ~MockEdgarServer();

    MockEdgarServer(const MockEdgarServer&) = delete;
    MockEdgarServer& operator=(const MockEdgarServer&) = delete;

    /// Binds 127.0.0.1 on `port` (0 picks a free one) and serves in a
    /// background thread. Returns the bound port.
    int start(int port = 0);
    void stop();

    std::string base_url() const;            // http://127.0.0.1:<port>/Archives
    std::string metadata_base_url() const;   // http://127.0.0.1:<port>/metadata

    void set_overlay(std::optional<std::filesystem::path> overlay);

    /// The next `n` requests answer HTTP `status` with an empty body.
    void fail_next(int n, int status = 500);
    /// The next `n` requests answer 200 with the throttle page.
    void throttle_next(int n);
    /// Every request answers 200 with the throttle page while set.
    void throttle_all(bool on);
    /// The next `n` file responses close the connection half-way through.
    void truncate_next(int n);
    void set_throttle_page(std::string body);

    /// "METHOD path" per request, in arrival order.
    std::vector<std::string> request_log() const;
    std::size_t request_count() const;
    void clear_log();

private:
    struct State;
    std::unique_ptr<State> state_;
};

} // namespace edgar::mock
