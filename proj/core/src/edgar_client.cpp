#include "edgar/edgar_client.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <fstream>

#include "edgar/date.hpp"
#include "edgar/error.hpp"
#include "edgar/text_codec.hpp"

namespace edgar {

std::string_view to_string(IndexType type) noexcept
{
    switch (type) {
    case IndexType::company: return "company";
    case IndexType::form: return "form";
    case IndexType::master: return "master";
    case IndexType::xbrl: return "xbrl";
    }
    return "master";
}

std::optional<IndexType> parse_index_type(std::string_view text) noexcept
{
    for (auto type : kAllIndexTypes) {
        if (to_string(type) == text) {
            return type;
        }
    }
    return std::nullopt;
}

std::vector<std::string> default_rate_limit_signatures()
{
    return {
        "Request Rate Threshold Exceeded",
        "Your Request Originates from an Undeclared Automated Tool",
    };
}

std::vector<std::string> default_access_denied_signatures()
{
    return {
        "<Code>AccessDenied</Code>",
        "<TITLE>Access Denied</TITLE>",
        "You don't have permission to access",
    };
}

std::vector<std::string> load_signature_file(const std::string& file_path)
{
    std::ifstream in(file_path);
    if (!in) {
        throw Error(ErrorCode::InvalidConfig, "cannot read signature file " + file_path);
    }
    std::vector<std::string> signatures;
    std::string line;
    while (std::getline(in, line)) {
        const auto marker = trim(line);
        if (marker.empty() || marker.front() == '#') {
            continue;
        }
        signatures.emplace_back(marker);
    }
    return signatures;
}

bool matches_any_signature(std::string_view body, std::span<const std::string> signatures) noexcept
{
    if (body.empty()) {
        return false;
    }
    for (const auto& marker : signatures) {
        if (!marker.empty() && body.find(marker) != std::string_view::npos) {
            return true;
        }
    }
    return false;
}

void ClientConfig::validate() const
{
    const auto fail = [](const std::string& key, const std::string& why) {
        throw Error(ErrorCode::InvalidConfig, key + ": " + why);
    };
    if (trim(user_agent).empty()) {
        fail("edgar.user_agent", "must name a contact (the archive refuses anonymous automated clients)");
    }
    if (!(max_requests_per_second > 0.0) || !std::isfinite(max_requests_per_second)) {
        fail("edgar.max_requests_per_second", "must be > 0");
    }
    if (max_retries < 0 || max_retries > 16) {
        fail("edgar.max_retries", "must be between 0 and 16");
    }
    if (backoff_base.count() < 0) {
        fail("edgar.backoff_base_ms", "must be >= 0");
    }
    if (timeout.count() <= 0) {
        fail("edgar.timeout_ms", "must be > 0");
    }
    for (const auto& [key, url] : {std::pair{"edgar.base_url", base_url}, {"edgar.metadata_base_url", metadata_base_url}}) {
        try {
            (void)parse_url(url);
        } catch (const Error& e) {
            fail(key, e.what());
        }
    }
    if (index_path_template.find("{year}") == std::string::npos ||
        index_path_template.find("{quarter}") == std::string::npos ||
        index_path_template.find("{type}") == std::string::npos) {
        fail("edgar.index_path_template", "must contain {year}, {quarter} and {type}");
    }
    if (metadata_path_template.find("{cik") == std::string::npos) {
        fail("edgar.metadata_path_template", "must contain {cik} or {cik10}");
    }
    if (first_index_year < 1900 || (last_index_year != 0 && last_index_year < first_index_year)) {
        fail("edgar.first_index_year", "year range is empty");
    }
}

void validate_resource_path(std::string_view path)
{
    if (path.empty()) {
        throw Error(ErrorCode::InvalidPath, "empty resource path");
    }
    if (path.front() == '/') {
        throw Error(ErrorCode::InvalidPath, "resource path must be archive-relative: " + std::string(path));
    }
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto slash = path.find('/', start);
        const auto segment = path.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start);
        if (segment == "..") {
            throw Error(ErrorCode::InvalidPath, "'..' segment in resource path: " + std::string(path));
        }
        if (slash == std::string_view::npos) {
            break;
        }
        start = slash + 1;
    }
}

namespace {

void replace_all(std::string& text, std::string_view from, std::string_view to)
{
    for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
        text.replace(pos, from.size(), to);
    }
}

int effective_last_year(const ClientConfig& config)
{
    return config.last_index_year != 0 ? config.last_index_year : static_cast<int>(utc_today().year());
}

} // namespace

std::string index_path(std::string_view path_template, int year, int quarter, IndexType type)
{
    std::string path(path_template);
    replace_all(path, "{year}", std::to_string(year));
    replace_all(path, "{quarter}", std::to_string(quarter));
    replace_all(path, "{type}", to_string(type));
    return path;
}

std::vector<IndexDescriptor> list_index_files(const ClientConfig& config, std::optional<int> year,
                                              std::optional<int> quarter)
{
    if (quarter && !year) {
        throw Error(ErrorCode::InvalidArgument, "quarter given without year");
    }
    if (quarter && (*quarter < 1 || *quarter > 4)) {
        throw Error(ErrorCode::InvalidArgument, "quarter must be 1-4, got " + std::to_string(*quarter));
    }
    const int first = year ? *year : config.first_index_year;
    const int last = year ? *year : effective_last_year(config);
    std::vector<IndexDescriptor> out;
    for (int y = first; y <= last; ++y) {
        for (int q = quarter.value_or(1); q <= quarter.value_or(4); ++q) {
            for (auto type : kAllIndexTypes) {
                out.push_back({y, q, type, index_path(config.index_path_template, y, q, type)});
            }
        }
    }
    return out;
}

EdgarClient::EdgarClient(ClientConfig config, std::shared_ptr<HttpTransport> transport, std::shared_ptr<Clock> clock)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      clock_(std::move(clock)),
      limiter_((config_.validate(), config_.max_requests_per_second), clock_),
      rng_(std::random_device{}())
{
    if (!transport_) {
        throw Error(ErrorCode::InvalidConfig, "EdgarClient needs a transport");
    }
}

std::vector<IndexDescriptor> EdgarClient::list_index_files(std::optional<int> year, std::optional<int> quarter) const
{
    return edgar::list_index_files(config_, year, quarter);
}

bool EdgarClient::is_rate_limited_payload(std::string_view body) const noexcept
{
    return matches_any_signature(body, config_.rate_limit_signatures);
}

std::string EdgarClient::fetch(std::string_view resource_path, std::optional<ByteRange> byte_range)
{
    validate_resource_path(resource_path);
    if (byte_range) {
        if (!byte_range->valid()) {
            throw Error(ErrorCode::InvalidPath, "empty byte range for " + std::string(resource_path));
        }
    }
    return get(join_url(config_.base_url, resource_path), std::string(resource_path), byte_range);
}

std::string EdgarClient::fetch_company_metadata(std::uint64_t cik)
{
    if (cik == 0) {
        throw Error(ErrorCode::InvalidArgument, "CIK must be positive");
    }
    std::string path = config_.metadata_path_template;
    char padded[24];
    std::snprintf(padded, sizeof padded, "%010llu", static_cast<unsigned long long>(cik));
    replace_all(path, "{cik10}", padded);
    replace_all(path, "{cik}", std::to_string(cik));
    return get(join_url(config_.metadata_base_url, path), "metadata for CIK " + std::to_string(cik), std::nullopt);
}

Clock::duration EdgarClient::backoff_delay(int retry)
{
    const double base = static_cast<double>(config_.backoff_base.count()) * std::pow(2.0, retry);
    const double capped = std::min(base, static_cast<double>(config_.backoff_cap.count()));
    double factor = 1.0;
    {
        std::lock_guard lock(rng_mutex_);
        factor = std::uniform_real_distribution<double>(0.5, 1.0)(rng_);
    }
    return std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double, std::milli>(capped * factor));
}

std::string EdgarClient::get(const std::string& url, const std::string& what, std::optional<ByteRange> byte_range)
{
    HttpRequest request;
    request.url = url;
    request.headers.emplace_back("User-Agent", config_.user_agent);
    if (byte_range) {
        request.headers.emplace_back("Range", "bytes=" + std::to_string(byte_range->begin) + "-" +
                                                  std::to_string(byte_range->end - 1));
    }

    ErrorCode last_code = ErrorCode::Transport;
    std::string last_message;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            clock_->sleep_for(backoff_delay(attempt - 1));
        }
        limiter_.acquire();
        ++attempts_;

        HttpResponse response;
        try {
            response = transport_->send(request);
        } catch (const Error& e) {
            last_code = ErrorCode::Transport;
            last_message = e.what();
            spdlog::debug("fetch {} attempt {} failed: {}", what, attempt + 1, last_message);
            continue;
        }

        if (is_rate_limited_payload(response.body) || response.status == 429) {
            last_code = ErrorCode::RateLimited;
            last_message = "rate-limit response (HTTP " + std::to_string(response.status) + ") for " + what;
            spdlog::warn("{} (attempt {})", last_message, attempt + 1);
            continue;
        }
        if (response.status >= 500) {
            last_code = ErrorCode::Transport;
            last_message = "HTTP " + std::to_string(response.status) + " for " + what;
            continue;
        }
        if (response.status == 404 || response.status == 410) {
            throw Error(ErrorCode::NotFound, what);
        }
        if (response.status == 403 || response.status == 401) {
            throw Error(ErrorCode::AccessDenied, "HTTP " + std::to_string(response.status) + " for " + what);
        }
        if (response.status == 416 && byte_range) {
            return {};
        }
        if (response.status == 206 && byte_range) {
            if (response.body.size() > byte_range->length()) {
                response.body.resize(byte_range->length());
            }
            return std::move(response.body);
        }
        if (response.status >= 200 && response.status < 300) {
            if (byte_range) {
                // Server ignored the Range header and sent the whole file.
                return slice(response.body, *byte_range);
            }
            return std::move(response.body);
        }
        throw Error(ErrorCode::Transport, "unexpected HTTP " + std::to_string(response.status) + " for " + what);
    }
    throw Error(last_code, last_message + " after " + std::to_string(config_.max_retries + 1) + " attempts");
}

} // namespace edgar
