#include "test_support.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <edgar/error.hpp>

#ifndef EDGAR_FIXTURE_DIR
#error "EDGAR_FIXTURE_DIR must point at tests/fixtures"
#endif

namespace edgar::test {

namespace fs = std::filesystem;

fs::path fixture_dir() { return fs::path(EDGAR_FIXTURE_DIR); }

fs::path fixture(const std::string& relative) { return fixture_dir() / relative; }

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

const nlohmann::json& manifest()
{
    static const nlohmann::json json = nlohmann::json::parse(read_file(fixture("manifest.json")));
    return json;
}

Date fixed_today() { return Date{std::chrono::year{2018}, std::chrono::month{6}, std::chrono::day{30}}; }

TempDir::TempDir()
{
    std::string pattern = (fs::temp_directory_path() / "edgar-test-XXXXXX").string();
    if (!::mkdtemp(pattern.data())) {
        throw std::runtime_error("mkdtemp failed");
    }
    path_ = pattern;
}

TempDir::~TempDir()
{
    std::error_code ec;
    fs::remove_all(path_, ec);
}

HttpResponse FakeTransport::send(const HttpRequest& request)
{
    {
        std::lock_guard lock(mutex_);
        requests_.push_back(request);
    }
    return handler_(request);
}

std::vector<HttpRequest> FakeTransport::requests() const
{
    std::lock_guard lock(mutex_);
    return requests_;
}

std::size_t FakeTransport::request_count() const
{
    std::lock_guard lock(mutex_);
    return requests_.size();
}

ClientConfig fast_client_config(const std::string& base_url, const std::string& metadata_base_url)
{
    ClientConfig config;
    config.base_url = base_url;
    config.metadata_base_url = metadata_base_url;
    config.user_agent = "edgar-tests test@example.com";
    config.max_requests_per_second = 2000;
    config.max_retries = 3;
    config.backoff_base = std::chrono::milliseconds(1);
    config.backoff_cap = std::chrono::milliseconds(5);
    config.timeout = std::chrono::milliseconds(5000);
    return config;
}

std::string random_bytes(std::mt19937_64& rng, std::size_t length)
{
    std::string out(length, '\0');
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& c : out) {
        c = static_cast<char>(byte(rng));
    }
    return out;
}

std::string object_listing(ObjectStore& store)
{
    std::string out;
    auto cursor = store.list_keys("");
    while (auto key = cursor->next()) {
        const auto ref = store.stat(*key);
        out += *key;
        if (ref) {
            out += " compressed=" + std::to_string(ref->compressed) + " stored=" + std::to_string(ref->stored_length) +
                   " logical=" + std::to_string(ref->logical_length);
        }
        out += '\n';
    }
    return out;
}

std::int64_t brute_force_count(const std::string& text, const std::string& term, bool case_sensitive)
{
    const auto fold = [&](char c) {
        if (!case_sensitive && c >= 'A' && c <= 'Z') {
            return static_cast<char>(c + ('a' - 'A'));
        }
        return c;
    };
    if (term.empty()) {
        return 0;
    }
    std::int64_t count = 0;
    std::size_t i = 0;
    while (i + term.size() <= text.size()) {
        std::size_t j = 0;
        while (j < term.size() && fold(text[i + j]) == fold(term[j])) {
            ++j;
        }
        if (j == term.size()) {
            ++count;
            i += term.size();
        } else {
            ++i;
        }
    }
    return count;
}

Harness::Harness() : Harness(Options{}) {}

Harness::Harness(Options options) : options_(std::move(options)), server_(options_.archive_root)
{
    server_.start();
    auto transport = make_http_transport(std::chrono::seconds(5));
    client_ = std::make_unique<EdgarClient>(fast_client_config(server_.base_url(), server_.metadata_base_url()),
                                            transport);
    std::unique_ptr<StorageBackend> backend;
    if (options_.backend == Backend::s3) {
        s3_ = std::make_unique<mock::S3Emulator>();
        s3_->start();
        S3Config s3;
        s3.endpoint = s3_->endpoint();
        s3.bucket = "corpus";
        s3.access_key = "AKIDEXAMPLE";
        s3.secret_key = "wJalrXUtnFEMI/K7MDENG+bPxRfiCYEXAMPLEKEY";
        s3.page_size = 7;
        backend = make_s3_backend(s3, transport);
    } else {
        backend = make_filesystem_backend(dir_ / "objects");
    }
    ObjectStoreOptions store_options;
    store_options.lock_dir = dir_ / "locks";
    objects_ = std::make_unique<ObjectStore>(std::move(backend), store_options);
    metadata_ = std::make_unique<MetadataStore>(dir_ / "metadata.sqlite3");
    PipelineConfig config;
    config.worker_count = options_.worker_count;
    config.compress_objects = options_.compress;
    config.today = fixed_today;
    pipeline_ = std::make_unique<Pipeline>(*client_, *objects_, *metadata_, config);
}

Harness::~Harness()
{
    server_.stop();
    if (s3_) {
        s3_->stop();
    }
}

std::vector<RunReport> Harness::ingest_all()
{
    const int year = manifest()["year"].get<int>();
    std::vector<RunReport> reports;
    reports.push_back(pipeline_->download_filing_index_data(year));
    reports.push_back(pipeline_->process_all_filing_index(year));
    reports.push_back(pipeline_->update_company_metadata());
    reports.push_back(pipeline_->extract_all_text());
    return reports;
}

std::string Harness::snapshot() { return metadata_->dump() + "## objects\n" + object_listing(*objects_); }

} // namespace edgar::test
