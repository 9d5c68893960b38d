#pragma once

#include <cstddef>
#include <memory>
#include <string>

namespace edgar::mock {

/// Text extraction server speaking the PUT-bytes / text-plain-back contract
/// at /extract. It answers with the printable ASCII runs of at least four
/// characters found in the body, one per line, like `strings`.
class MockExtractionService {
public:
    MockExtractionService();
    ~MockExtractionService();

    MockExtractionService(const MockExtractionService&) = delete;
    MockExtractionService& operator=(const MockExtractionService&) = delete;

    int start(int port = 0);
    void stop();
    std::string url() const;   // http://127.0.0.1:<port>/extract

    /// While set, every request answers 503.
    void set_unavailable(bool on);
    std::size_t request_count() const;

    /// The transformation the service applies, exposed for test oracles.
    static std::string printable_runs(const std::string& body);

private:
    struct State;
    std::unique_ptr<State> state_;
};

} // namespace edgar::mock
