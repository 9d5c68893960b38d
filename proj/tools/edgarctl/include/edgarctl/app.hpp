#pragma once

#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include <edgar/edgar_client.hpp>
#include <edgar/metadata_store.hpp>
#include <edgar/object_store.hpp>
#include <edgar/pipeline.hpp>
#include <edgar/text_extract.hpp>

#include "edgarctl/config.hpp"

namespace edgarctl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitPartialFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 78;

/// Everything a command needs, wired from one CliConfig.
struct Runtime {
    CliConfig config;
    std::shared_ptr<edgar::HttpTransport> transport;
    std::unique_ptr<edgar::EdgarClient> client;
    std::unique_ptr<edgar::ObjectStore> objects;
    std::unique_ptr<edgar::MetadataStore> metadata;
    std::unique_ptr<edgar::ExternalExtractor> extractor;
    std::unique_ptr<edgar::Pipeline> pipeline;
};

std::unique_ptr<Runtime> open_runtime(const CliConfig& config);

/// Runs one command line (without the program name). Progress and reports go
/// to `err`, command output to `out`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        EnvLookup env = process_environment());

} // namespace edgarctl
