#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace edgar::mock {

/// In-memory, path-style S3 subset: PUT, GET (with Range), HEAD, DELETE and
/// ListObjectsV2 with pagination. Requests must carry a SigV4 Authorization
/// header; signatures are not verified.
class S3Emulator {
public:
    S3Emulator();
    ~S3Emulator();

    S3Emulator(const S3Emulator&) = delete;
    S3Emulator& operator=(const S3Emulator&) = delete;

    int start(int port = 0);
    void stop();
    std::string endpoint() const;   // http://127.0.0.1:<port>

    std::vector<std::string> keys(const std::string& bucket) const;
    std::size_t request_count() const;
    /// The next `n` requests answer 503.
    void fail_next(int n);

private:
    struct State;
    std::unique_ptr<State> state_;
};

} // namespace edgar::mock
