#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <edgar/clock.hpp>
#include <edgar/edgar_client.hpp>
#include <edgar/http_transport.hpp>
#include <edgar/metadata_store.hpp>
#include <edgar/object_store.hpp>
#include <edgar/pipeline.hpp>
#include <edgar/mock/mock_edgar_server.hpp>
#include <edgar/mock/s3_emulator.hpp>

namespace edgar::test {

std::filesystem::path fixture_dir();
std::filesystem::path fixture(const std::string& relative);
std::string read_file(const std::filesystem::path& path);
const nlohmann::json& manifest();

/// Fixed "today" so dumps taken on different days compare equal.
Date fixed_today();

class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const noexcept { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

/// Scripted transport: every request is recorded and answered by `handler`.
class FakeTransport final : public HttpTransport {
public:
    using Handler = std::function<HttpResponse(const HttpRequest&)>;
    explicit FakeTransport(Handler handler) : handler_(std::move(handler)) {}

    HttpResponse send(const HttpRequest& request) override;
    std::vector<HttpRequest> requests() const;
    std::size_t request_count() const;

private:
    Handler handler_;
    mutable std::mutex mutex_;
    std::vector<HttpRequest> requests_;
};

ClientConfig fast_client_config(const std::string& base_url, const std::string& metadata_base_url);

std::string random_bytes(std::mt19937_64& rng, std::size_t length);

/// Every key with its stored metadata, one line each, in key order.
std::string object_listing(ObjectStore& store);

/// Non-overlapping occurrences, compared byte by byte.
std::int64_t brute_force_count(const std::string& text, const std::string& term, bool case_sensitive);

enum class Backend { filesystem, s3 };

/// A mock archive, fresh stores and a pipeline wired together.
class Harness {
public:
    struct Options {
        std::filesystem::path archive_root = fixture("mock_edgar");
        std::size_t worker_count = 4;
        Backend backend = Backend::filesystem;
        bool compress = true;
    };

    Harness();
    explicit Harness(Options options);
    ~Harness();

    mock::MockEdgarServer& server() { return server_; }
    EdgarClient& client() { return *client_; }
    ObjectStore& objects() { return *objects_; }
    MetadataStore& metadata() { return *metadata_; }
    Pipeline& pipeline() { return *pipeline_; }
    const TempDir& dir() const { return dir_; }

    /// download -> process -> companies -> extract for the manifest year.
    std::vector<RunReport> ingest_all();

    /// Database dump plus object listing.
    std::string snapshot();

private:
    Options options_;
    TempDir dir_;
    mock::MockEdgarServer server_;
    std::unique_ptr<mock::S3Emulator> s3_;
    std::unique_ptr<EdgarClient> client_;
    std::unique_ptr<ObjectStore> objects_;
    std::unique_ptr<MetadataStore> metadata_;
    std::unique_ptr<Pipeline> pipeline_;
};

} // namespace edgar::test
