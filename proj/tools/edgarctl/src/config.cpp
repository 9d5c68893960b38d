#include "edgarctl/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>

#include <edgar/error.hpp>
#include <edgar/text_codec.hpp>

namespace edgarctl {

namespace {

using edgar::Error;
using edgar::ErrorCode;

[[noreturn]] void bad(const std::string& key, const std::string& why)
{
    throw Error(ErrorCode::InvalidConfig, key + ": " + why);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value)
{
    T out{};
    const auto text = edgar::trim(value);
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, out);
    if (ec != std::errc{} || ptr != end || text.empty()) {
        bad(key, "expected a number, got '" + value + "'");
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value)
{
    try {
        std::size_t used = 0;
        const double out = std::stod(value, &used);
        if (used == value.size()) {
            return out;
        }
    } catch (const std::exception&) {
    }
    bad(key, "expected a number, got '" + value + "'");
}

bool parse_bool(const std::string& key, const std::string& value)
{
    const auto text = edgar::to_lower_ascii(edgar::trim(value));
    if (text == "1" || text == "true" || text == "yes" || text == "on") {
        return true;
    }
    if (text == "0" || text == "false" || text == "no" || text == "off") {
        return false;
    }
    bad(key, "expected true or false, got '" + value + "'");
}

std::chrono::milliseconds parse_ms(const std::string& key, const std::string& value)
{
    return std::chrono::milliseconds(parse_number<long long>(key, value));
}

void flatten(const nlohmann::json& node, const std::string& prefix, std::map<std::string, std::string>& out)
{
    if (node.is_object()) {
        for (const auto& [name, child] : node.items()) {
            flatten(child, prefix.empty() ? name : prefix + "." + name, out);
        }
        return;
    }
    if (node.is_null()) {
        return;
    }
    if (node.is_array()) {
        bad(prefix, "arrays are not accepted");
    }
    out[prefix] = node.is_string() ? node.get<std::string>() : node.dump();
}

} // namespace

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = {
        {"edgar.base_url", "Archive root URL"},
        {"edgar.metadata_base_url", "Company metadata root URL"},
        {"edgar.user_agent", "User-Agent naming a contact; required"},
        {"edgar.max_requests_per_second", "Request ceiling across all workers"},
        {"edgar.max_retries", "Retries per request"},
        {"edgar.backoff_base_ms", "First retry delay"},
        {"edgar.backoff_cap_ms", "Largest retry delay"},
        {"edgar.timeout_ms", "Per-request timeout"},
        {"edgar.index_path_template", "Index path with {year} {quarter} {type}"},
        {"edgar.metadata_path_template", "Metadata path with {cik} or {cik10}"},
        {"edgar.first_index_year", "First year listed when no year is given"},
        {"edgar.last_index_year", "Last year listed; 0 means the current year"},
        {"edgar.rate_limit_signature_file", "File of throttle-page markers, one per line"},
        {"store.backend", "filesystem or s3"},
        {"store.root", "Filesystem backend directory"},
        {"store.compress", "gzip objects on write"},
        {"store.quota_bytes", "Refuse writes beyond this many stored bytes"},
        {"store.lock_dir", "Directory for sweep lock files"},
        {"store.access_denied_signature_file", "File of access-denied markers, one per line"},
        {"store.s3.endpoint", "S3 endpoint URL"},
        {"store.s3.bucket", "S3 bucket"},
        {"store.s3.region", "S3 region"},
        {"store.s3.access_key", "S3 access key id"},
        {"store.s3.secret_key", "S3 secret key"},
        {"store.s3.page_size", "Keys per list request"},
        {"database.path", "SQLite database file"},
        {"extractor.url", "Text extraction service URL"},
        {"pipeline.worker_count", "Worker threads"},
        {"pipeline.retry_limit", "Retries for jobs that throw"},
        {"pipeline.retry_unextracted", "Offer unextracted bodies to extraction again"},
        {"log.level", "trace, debug, info, warn, error or off"},
    };
    return keys;
}

std::string env_name_for(const std::string& key)
{
    std::string name = key.rfind("edgar.", 0) == 0 ? key.substr(6) : key;
    for (auto& c : name) {
        c = c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
    return "EDGAR_" + name;
}

EnvLookup process_environment()
{
    return [](const std::string& name) -> std::optional<std::string> {
        if (const char* value = std::getenv(name.c_str())) {
            return std::string(value);
        }
        return std::nullopt;
    };
}

void apply_setting(CliConfig& config, const std::string& key, const std::string& value)
{
    auto& client = config.client;
    if (key == "edgar.base_url") {
        client.base_url = value;
    } else if (key == "edgar.metadata_base_url") {
        client.metadata_base_url = value;
    } else if (key == "edgar.user_agent") {
        client.user_agent = value;
    } else if (key == "edgar.max_requests_per_second") {
        client.max_requests_per_second = parse_double(key, value);
    } else if (key == "edgar.max_retries") {
        client.max_retries = parse_number<int>(key, value);
    } else if (key == "edgar.backoff_base_ms") {
        client.backoff_base = parse_ms(key, value);
    } else if (key == "edgar.backoff_cap_ms") {
        client.backoff_cap = parse_ms(key, value);
    } else if (key == "edgar.timeout_ms") {
        client.timeout = parse_ms(key, value);
    } else if (key == "edgar.index_path_template") {
        client.index_path_template = value;
    } else if (key == "edgar.metadata_path_template") {
        client.metadata_path_template = value;
    } else if (key == "edgar.first_index_year") {
        client.first_index_year = parse_number<int>(key, value);
    } else if (key == "edgar.last_index_year") {
        client.last_index_year = parse_number<int>(key, value);
    } else if (key == "edgar.rate_limit_signature_file") {
        try {
            client.rate_limit_signatures = edgar::load_signature_file(value);
        } catch (const Error& e) {
            bad(key, e.what());
        }
    } else if (key == "store.backend") {
        if (value != "filesystem" && value != "s3") {
            bad(key, "expected filesystem or s3, got '" + value + "'");
        }
        config.store_backend = value;
    } else if (key == "store.root") {
        config.store_root = value;
    } else if (key == "store.compress") {
        config.compress = parse_bool(key, value);
    } else if (key == "store.quota_bytes") {
        config.quota_bytes = parse_number<std::uint64_t>(key, value);
    } else if (key == "store.lock_dir") {
        config.lock_dir = value;
    } else if (key == "store.access_denied_signature_file") {
        config.access_denied_signature_file = value;
    } else if (key == "store.s3.endpoint") {
        config.s3.endpoint = value;
    } else if (key == "store.s3.bucket") {
        config.s3.bucket = value;
    } else if (key == "store.s3.region") {
        config.s3.region = value;
    } else if (key == "store.s3.access_key") {
        config.s3.access_key = value;
    } else if (key == "store.s3.secret_key") {
        config.s3.secret_key = value;
    } else if (key == "store.s3.page_size") {
        config.s3.page_size = parse_number<int>(key, value);
    } else if (key == "database.path") {
        config.database = value;
    } else if (key == "extractor.url") {
        if (value.empty()) {
            config.extractor_url.reset();
        } else {
            config.extractor_url = value;
        }
    } else if (key == "pipeline.worker_count") {
        config.worker_count = parse_number<std::size_t>(key, value);
    } else if (key == "pipeline.retry_limit") {
        config.retry_limit = parse_number<int>(key, value);
    } else if (key == "pipeline.retry_unextracted") {
        config.retry_unextracted = parse_bool(key, value);
    } else if (key == "log.level") {
        static const std::vector<std::string> levels = {"trace", "debug", "info", "warn", "error", "off"};
        if (std::find(levels.begin(), levels.end(), value) == levels.end()) {
            bad(key, "unknown level '" + value + "'");
        }
        config.log_level = value;
    } else {
        bad(key, "unknown configuration key");
    }
}

void validate(const CliConfig& config)
{
    config.client.validate();
    if (config.worker_count < 1 || config.worker_count > 256) {
        bad("pipeline.worker_count", "must be between 1 and 256");
    }
    if (config.retry_limit < 0) {
        bad("pipeline.retry_limit", "must be >= 0");
    }
    if (config.store_backend == "filesystem" && config.store_root.empty()) {
        bad("store.root", "must be set for the filesystem backend");
    }
    if (config.store_backend == "s3") {
        if (config.s3.endpoint.empty()) {
            bad("store.s3.endpoint", "must be set for the s3 backend");
        }
        try {
            (void)edgar::parse_url(config.s3.endpoint);
        } catch (const Error& e) {
            bad("store.s3.endpoint", e.what());
        }
        if (config.s3.bucket.empty()) {
            bad("store.s3.bucket", "must be set for the s3 backend");
        }
        if (config.s3.access_key.empty() || config.s3.secret_key.empty()) {
            bad("store.s3.access_key", "credentials must be set for the s3 backend");
        }
        if (config.s3.page_size < 1 || config.s3.page_size > 1000) {
            bad("store.s3.page_size", "must be between 1 and 1000");
        }
    }
    if (config.database.empty()) {
        bad("database.path", "must be set");
    }
    if (config.extractor_url) {
        try {
            (void)edgar::parse_url(*config.extractor_url);
        } catch (const Error& e) {
            bad("extractor.url", e.what());
        }
    }
}

CliConfig load_config(const ConfigSources& sources)
{
    std::map<std::string, std::string> merged;
    if (sources.file) {
        std::ifstream in(*sources.file);
        if (!in) {
            throw Error(ErrorCode::InvalidConfig, "cannot read config file " + sources.file->string());
        }
        nlohmann::json document;
        try {
            document = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::InvalidConfig, sources.file->string() + ": " + e.what());
        }
        if (!document.is_object()) {
            throw Error(ErrorCode::InvalidConfig, sources.file->string() + ": top level must be an object");
        }
        flatten(document, "", merged);
    }
    for (const auto& key : config_keys()) {
        if (auto value = sources.env(env_name_for(key.name))) {
            merged[key.name] = *value;
        }
    }
    for (const auto& [key, value] : sources.overrides) {
        merged[key] = value;
    }

    CliConfig config;
    for (const auto& [key, value] : merged) {
        apply_setting(config, key, value);
    }
    validate(config);
    return config;
}

} // namespace edgarctl
