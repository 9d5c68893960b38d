#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/byte_range.hpp"
#include "edgar/clock.hpp"
#include "edgar/http_transport.hpp"
#include "edgar/rate_limiter.hpp"

namespace edgar {

enum class IndexType { company, form, master, xbrl };

inline constexpr IndexType kAllIndexTypes[] = {IndexType::company, IndexType::form, IndexType::master,
                                               IndexType::xbrl};

std::string_view to_string(IndexType type) noexcept;
std::optional<IndexType> parse_index_type(std::string_view text) noexcept;

struct IndexDescriptor {
    int year = 0;
    int quarter = 0;
    IndexType index_type = IndexType::master;
    std::string path;

    friend bool operator==(const IndexDescriptor&, const IndexDescriptor&) = default;
};

/// Archive-relative resource and whatever the server told us about it.
struct EdgarResource {
    std::string path;
    std::optional<std::string> last_modified;
    std::optional<std::uint64_t> size;
    std::optional<std::string> etag;
};

/// Marker phrases from the archive's throttle page. Matching is a plain
/// case-sensitive substring test against the response body.
std::vector<std::string> default_rate_limit_signatures();

/// Markers of S3/HTTP access-denied error bodies.
std::vector<std::string> default_access_denied_signatures();

/// One marker per line; blank lines and lines starting with '#' are ignored.
std::vector<std::string> load_signature_file(const std::string& file_path);

bool matches_any_signature(std::string_view body, std::span<const std::string> signatures) noexcept;

struct ClientConfig {
    std::string base_url = "https://www.sec.gov/Archives";
    std::string metadata_base_url = "https://data.sec.gov";
    std::string user_agent;
    double max_requests_per_second = 8.0;
    int max_retries = 4;
    std::chrono::milliseconds backoff_base{500};
    std::chrono::milliseconds backoff_cap{30'000};
    std::chrono::milliseconds timeout{30'000};
    /// Placeholders: {year} {quarter} {type}
    std::string index_path_template = "edgar/full-index/{year}/QTR{quarter}/{type}.idx";
    /// Placeholders: {cik} {cik10}
    std::string metadata_path_template = "submissions/CIK{cik10}.json";
    int first_index_year = 1993;
    int last_index_year = 0;   // 0 = current UTC year
    std::vector<std::string> rate_limit_signatures = default_rate_limit_signatures();

    /// Throws InvalidConfig naming the offending field.
    void validate() const;
};

/// Throws InvalidPath when the path is empty, absolute, or has a ".." segment.
void validate_resource_path(std::string_view path);

/// Expands the index template for one (year, quarter, type).
std::string index_path(std::string_view path_template, int year, int quarter, IndexType type);

/// Pure cross product of years x quarters x types in a fixed order
/// (year, quarter, then company/form/master/xbrl).
std::vector<IndexDescriptor> list_index_files(const ClientConfig& config, std::optional<int> year,
                                              std::optional<int> quarter);

/// Rate-limited, retrying client for the EDGAR archive.
class EdgarClient {
public:
    EdgarClient(ClientConfig config, std::shared_ptr<HttpTransport> transport,
                std::shared_ptr<Clock> clock = system_clock());

    /// Whole file, or the requested half-open slice of it. A slice may come
    /// back short only at end-of-file.
    std::string fetch(std::string_view resource_path, std::optional<ByteRange> byte_range = std::nullopt);

    std::vector<IndexDescriptor> list_index_files(std::optional<int> year = std::nullopt,
                                                  std::optional<int> quarter = std::nullopt) const;

    std::string fetch_company_metadata(std::uint64_t cik);

    bool is_rate_limited_payload(std::string_view body) const noexcept;

    const ClientConfig& config() const noexcept { return config_; }
    std::uint64_t attempts_made() const noexcept { return attempts_.load(); }

private:
    std::string get(const std::string& url, const std::string& what, std::optional<ByteRange> byte_range);
    Clock::duration backoff_delay(int retry);

    ClientConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<Clock> clock_;
    RateLimiter limiter_;
    std::atomic<std::uint64_t> attempts_{0};
    std::mutex rng_mutex_;
    std::mt19937_64 rng_;
};

} // namespace edgar
