#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "edgar/date.hpp"
#include "edgar/edgar_client.hpp"
#include "edgar/job_executor.hpp"
#include "edgar/metadata_store.hpp"
#include "edgar/object_store.hpp"
#include "edgar/text_extract.hpp"

namespace edgar {

struct PipelineConfig {
    std::size_t worker_count = 4;
    int retry_limit = 2;
    bool compress_objects = true;
    /// Source of "today" for date_downloaded / as_of / created stamps.
    std::function<Date()> today = utc_today;
    std::vector<IndexType> index_types{std::begin(kAllIndexTypes), std::end(kAllIndexTypes)};
    std::optional<std::size_t> stop_after;
    bool retry_unextracted = false;
};

struct SearchTermSpec {
    std::string term;
    bool case_sensitive = false;
};

struct SearchHit {
    std::string accession_number;
    std::uint32_t sequence = 1;
    std::string sha1;
    std::string term;
    std::int64_t count = 0;

    friend bool operator==(const SearchHit&, const SearchHit&) = default;
};

struct SearchRun {
    std::int64_t query_id = 0;
    std::vector<SearchHit> hits;   // ordered by (accession, sequence, term)
    RunReport report;
};

/// Non-overlapping substring occurrences; ASCII case folding unless
/// `case_sensitive`. Empty terms count zero.
std::int64_t count_occurrences(std::string_view text, std::string_view term, bool case_sensitive);

/// Canonical label for a search, used as its natural key.
std::string search_label(const std::vector<SearchTermSpec>& terms, const DocumentScope& scope);

/// Parses a company metadata document (submissions JSON: name,
/// stateOfIncorporation, sic). Throws InvalidArgument when malformed.
struct CompanyMetadata {
    std::string name;
    std::optional<std::string> state_of_incorporation;
    std::optional<std::string> sic;
};
CompanyMetadata parse_company_metadata(std::string_view body);

/// Ingestion workflow. Every operation is incremental: state flags decide
/// what still needs doing, so the first run and every later run are the same
/// code path.
class Pipeline {
public:
    Pipeline(EdgarClient& client, ObjectStore& objects, MetadataStore& metadata, PipelineConfig config = {},
             const ExternalExtractor* extractor = nullptr);

    RunReport download_filing_index_data(std::optional<int> year = std::nullopt,
                                         std::optional<int> quarter = std::nullopt);

    RunReport process_all_filing_index(std::optional<int> year = std::nullopt,
                                       std::optional<std::set<std::string>> form_types = std::nullopt,
                                       std::optional<int> quarter = std::nullopt);

    RunReport update_company_metadata();

    RunReport extract_all_text();

    SearchRun run_search(const std::vector<SearchTermSpec>& terms, const DocumentScope& scope = {});

    const PipelineConfig& config() const noexcept { return config_; }
    PipelineConfig& config() noexcept { return config_; }

private:
    ExecuteOptions execute_options() const;
    JobOutcome download_index(const IndexDescriptor& descriptor);
    JobOutcome process_filing(const FilingSource& source);

    EdgarClient& client_;
    ObjectStore& objects_;
    MetadataStore& metadata_;
    PipelineConfig config_;
    const ExternalExtractor* extractor_;
};

} // namespace edgar
