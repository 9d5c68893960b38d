#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/date.hpp"
#include "edgar/edgar_client.hpp"
#include "edgar/filing_parser.hpp"

struct sqlite3;

namespace edgar {

struct Company {
    std::uint64_t cik = 0;
    Date date_first_seen{};

    friend bool operator==(const Company&, const Company&) = default;
};

struct CompanyInfo {
    std::uint64_t cik = 0;
    std::string name;
    std::optional<std::string> state_of_incorporation;
    std::optional<std::string> sic;
    Date as_of{};

    friend bool operator==(const CompanyInfo&, const CompanyInfo&) = default;
};

struct FilingIndex {
    std::string edgar_path;
    int year = 0;
    int quarter = 0;
    IndexType index_type = IndexType::master;
    std::optional<Date> date_downloaded;
    bool is_processed = false;
    bool is_error = false;
    std::optional<std::int64_t> row_count;
    std::optional<std::string> error_detail;

    friend bool operator==(const FilingIndex&, const FilingIndex&) = default;
};

struct Filing {
    std::string accession_number;
    std::uint64_t cik = 0;
    std::string form_type;
    std::optional<Date> date_filed;
    std::string edgar_path;
    std::optional<std::string> raw_object_key;
    bool is_processed = false;
    bool is_error = false;
    std::optional<std::int64_t> document_count;
    std::optional<std::string> error_detail;

    friend bool operator==(const Filing&, const Filing&) = default;
};

enum class ExtractState { pending, extracted, unextracted, failed };

std::string_view to_string(ExtractState state) noexcept;

struct FilingDocument {
    std::string accession_number;
    std::uint32_t sequence = 1;
    std::optional<std::string> doc_type;
    std::optional<std::string> description;
    std::optional<std::string> filename;
    std::string sha1;
    std::string content_type;
    bool is_extracted = false;
    ExtractState extract_state = ExtractState::pending;
    std::optional<std::string> extract_detail;

    friend bool operator==(const FilingDocument&, const FilingDocument&) = default;
};

struct SearchQueryTerm {
    std::string term;
    bool case_sensitive = false;

    friend bool operator==(const SearchQueryTerm&, const SearchQueryTerm&) = default;
};

struct SearchQuery {
    std::int64_t id = 0;
    Date created{};
    std::string label;
    std::vector<SearchQueryTerm> terms;
};

struct SearchQueryResult {
    std::string term;
    std::string accession_number;
    std::uint32_t sequence = 1;
    std::int64_t count = 0;

    friend bool operator==(const SearchQueryResult&, const SearchQueryResult&) = default;
};

/// Where a filing came from, as seen in the index. Supplies the archive path
/// and fallbacks for fields the filing header omits.
struct FilingSource {
    std::string accession_number;
    std::uint64_t cik = 0;
    std::string form_type;
    std::optional<Date> date_filed;
    std::string edgar_path;
};

struct FilingQuery {
    std::optional<std::string> form_type;
    std::optional<Date> filed_from;   // inclusive
    std::optional<Date> filed_to;     // inclusive
    std::optional<std::uint64_t> cik;
};

struct DocumentScope {
    std::optional<std::string> description_like;
    std::optional<std::string> form_type;
    std::optional<std::size_t> limit;
};

/// One distinct body awaiting extraction.
struct PendingBody {
    std::string sha1;
    std::string content_type;
    std::size_t document_count = 0;
};

struct AppendResult {
    CompanyInfo info;
    bool appended = false;
};

/// Relational store for the filing metadata model (SQLite by default).
///
/// All writes are natural-key upserts: replaying any call leaves the tables
/// unchanged. One connection is shared and serialized behind a mutex, so an
/// instance may be used from every worker thread.
class MetadataStore {
public:
    /// `path` may be ":memory:".
    explicit MetadataStore(const std::filesystem::path& path);
    ~MetadataStore();

    MetadataStore(const MetadataStore&) = delete;
    MetadataStore& operator=(const MetadataStore&) = delete;

    // Companies
    Company upsert_company(std::uint64_t cik, Date seen_on);
    std::optional<Company> company(std::uint64_t cik);
    std::vector<Company> companies();
    AppendResult append_company_info(std::uint64_t cik, std::string name, std::optional<std::string> state,
                                     std::optional<std::string> sic, Date as_of);
    std::optional<CompanyInfo> latest_company_info(std::uint64_t cik);
    std::vector<CompanyInfo> company_info_history(std::uint64_t cik);

    // Index files
    FilingIndex register_filing_index(const IndexDescriptor& descriptor);
    FilingIndex mark_filing_index_processed(const std::string& edgar_path, std::int64_t row_count, Date downloaded);
    FilingIndex mark_filing_index_error(const std::string& edgar_path, const std::string& detail,
                                        std::optional<Date> downloaded);
    std::optional<FilingIndex> filing_index(const std::string& edgar_path);
    std::vector<FilingIndex> filing_indexes(std::optional<int> year = std::nullopt);

    // Filings and documents
    Filing record_filing(const ParsedFiling& parsed, const std::string& raw_key, const FilingSource& source);
    std::vector<FilingDocument> record_documents(const std::string& accession_number,
                                                 std::span<const ParsedDocument> documents);
    Filing mark_filing_processed(const std::string& accession_number);
    /// record_filing + record_documents + mark_filing_processed in one transaction.
    Filing ingest_filing(const ParsedFiling& parsed, const std::string& raw_key, const FilingSource& source);
    Filing mark_filing_error(const FilingSource& source, const std::string& detail,
                             std::optional<std::string> raw_key = std::nullopt);
    std::optional<Filing> filing(const std::string& accession_number);
    std::vector<Filing> find_filings(const FilingQuery& query = {});
    std::vector<FilingDocument> documents_for(const std::string& accession_number);
    std::vector<FilingDocument> find_documents_by_description(std::string_view substring, std::size_t limit);
    std::vector<FilingDocument> documents_in_scope(const DocumentScope& scope, bool extracted_only);

    // Extraction state
    std::vector<PendingBody> pending_extractions(std::optional<std::size_t> limit, bool retry_unextracted);
    /// Updates every document row carrying this digest; returns rows changed.
    std::size_t set_extract_state(const std::string& sha1, ExtractState state,
                                  std::optional<std::string> detail = std::nullopt);

    // Term search
    SearchQuery upsert_search_query(const std::string& label, Date created, std::span<const SearchQueryTerm> terms);
    std::optional<SearchQuery> search_query(std::int64_t id);
    /// Zero counts are not stored (and clear an earlier non-zero row).
    /// Returns the number of non-zero results persisted.
    std::size_t save_search_results(std::int64_t query_id, std::span<const SearchQueryResult> results);
    std::vector<SearchQueryResult> search_results(std::int64_t query_id);

    // Introspection
    std::map<std::string, std::int64_t> row_counts();
    /// Every table, every column, ordered by natural key. Two stores with the
    /// same content produce identical dumps.
    std::string dump();

    static std::string_view schema_sql() noexcept;

private:
    class Statement;
    void exec(std::string_view sql);
    Filing record_filing_locked(const ParsedFiling& parsed, const std::string& raw_key, const FilingSource& source);
    std::vector<FilingDocument> record_documents_locked(const std::string& accession_number,
                                                        std::span<const ParsedDocument> documents);
    Filing mark_filing_processed_locked(const std::string& accession_number);
    std::optional<Filing> filing_locked(const std::string& accession_number);
    std::optional<FilingIndex> filing_index_locked(const std::string& edgar_path);
    std::vector<FilingDocument> documents_locked(const std::string& where, const std::vector<std::string>& params,
                                                 std::optional<std::size_t> limit);

    std::recursive_mutex mutex_;
    sqlite3* db_ = nullptr;
};

} // namespace edgar
