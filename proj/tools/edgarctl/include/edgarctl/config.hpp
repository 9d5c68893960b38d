#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <edgar/edgar_client.hpp>
#include <edgar/object_store.hpp>

namespace edgarctl {

/// Merged configuration for one invocation.
struct CliConfig {
    edgar::ClientConfig client;

    std::string store_backend = "filesystem";   // filesystem | s3
    std::filesystem::path store_root = "edgar-data/objects";
    edgar::S3Config s3;
    bool compress = true;
    std::optional<std::uint64_t> quota_bytes;
    std::filesystem::path lock_dir;
    std::optional<std::string> access_denied_signature_file;

    std::filesystem::path database = "edgar-data/metadata.sqlite3";

    std::optional<std::string> extractor_url;

    std::size_t worker_count = 4;
    int retry_limit = 2;
    bool retry_unextracted = false;

    std::string log_level = "info";
};

struct ConfigKey {
    const char* name;
    const char* description;
};

/// Every accepted key. The environment variable for `a.b_c` is `EDGAR_A_B_C`,
/// except that keys under `edgar.` drop that prefix (`EDGAR_USER_AGENT`).
const std::vector<ConfigKey>& config_keys();

std::string env_name_for(const std::string& key);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

EnvLookup process_environment();

struct ConfigSources {
    std::optional<std::filesystem::path> file;
    /// `key -> value` from command-line flags.
    std::map<std::string, std::string> overrides;
    EnvLookup env = process_environment();
};

/// defaults < file < environment < flags. Throws edgar::Error(InvalidConfig)
/// naming the offending key.
CliConfig load_config(const ConfigSources& sources);

/// Applies one textual value. Throws InvalidConfig for unknown keys or values
/// that do not parse.
void apply_setting(CliConfig& config, const std::string& key, const std::string& value);

/// Cross-field checks; throws InvalidConfig.
void validate(const CliConfig& config);

} // namespace edgarctl
