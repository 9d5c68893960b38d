#include "edgar/pipeline.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <map>
#include <mutex>

#include <nlohmann/json.hpp>

#include "edgar/error.hpp"
#include "edgar/index_parser.hpp"
#include "edgar/text_codec.hpp"

namespace edgar {

std::int64_t count_occurrences(std::string_view text, std::string_view term, bool case_sensitive)
{
    if (term.empty() || term.size() > text.size()) {
        return 0;
    }
    std::string folded_text;
    std::string folded_term;
    if (!case_sensitive) {
        folded_text = to_lower_ascii(text);
        folded_term = to_lower_ascii(term);
        text = folded_text;
        term = folded_term;
    }
    std::int64_t count = 0;
    for (auto pos = text.find(term); pos != std::string_view::npos; pos = text.find(term, pos + term.size())) {
        ++count;
    }
    return count;
}

std::string search_label(const std::vector<SearchTermSpec>& terms, const DocumentScope& scope)
{
    std::vector<std::string> parts;
    for (const auto& t : terms) {
        parts.push_back(t.term + (t.case_sensitive ? "|cs" : "|ci"));
    }
    std::sort(parts.begin(), parts.end());
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    std::string label = "terms=[";
    for (std::size_t i = 0; i < parts.size(); ++i) {
        label += (i ? "," : "") + parts[i];
    }
    label += "]";
    if (scope.description_like) {
        label += ";description~" + to_lower_ascii(*scope.description_like);
    }
    if (scope.form_type) {
        label += ";form=" + to_upper_ascii(*scope.form_type);
    }
    if (scope.limit) {
        label += ";limit=" + std::to_string(*scope.limit);
    }
    return label;
}

CompanyMetadata parse_company_metadata(std::string_view body)
{
    const auto json = nlohmann::json::parse(body, nullptr, false);
    if (json.is_discarded() || !json.is_object()) {
        throw Error(ErrorCode::InvalidArgument, "company metadata is not a JSON object");
    }
    const auto text_field = [&](const char* name) -> std::optional<std::string> {
        const auto it = json.find(name);
        if (it == json.end() || it->is_null()) {
            return std::nullopt;
        }
        std::string value;
        if (it->is_string()) {
            value = it->get<std::string>();
        } else if (it->is_number_integer()) {
            value = std::to_string(it->get<std::int64_t>());
        } else {
            throw Error(ErrorCode::InvalidArgument, std::string("company metadata field ") + name + " has a bad type");
        }
        value = std::string(trim(value));
        return value.empty() ? std::nullopt : std::optional<std::string>(value);
    };
    CompanyMetadata meta;
    auto name = text_field("name");
    if (!name) {
        throw Error(ErrorCode::InvalidArgument, "company metadata has no name");
    }
    meta.name = std::move(*name);
    meta.state_of_incorporation = text_field("stateOfIncorporation");
    meta.sic = text_field("sic");
    if (meta.sic) {
        if (meta.sic->size() > 4 || !std::all_of(meta.sic->begin(), meta.sic->end(), [](char c) {
                return c >= '0' && c <= '9';
            })) {
            throw Error(ErrorCode::InvalidArgument, "company metadata sic '" + *meta.sic + "' is not a 4-digit code");
        }
        meta.sic = std::string(4 - meta.sic->size(), '0') + *meta.sic;
    }
    return meta;
}

namespace {

class Counters {
public:
    void add(const std::string& name, std::int64_t delta = 1)
    {
        std::lock_guard lock(mutex_);
        values_[name] += delta;
    }
    void merge_into(RunReport& report)
    {
        std::lock_guard lock(mutex_);
        for (const auto& [name, value] : values_) {
            report.counters[name] += value;
        }
    }

private:
    std::mutex mutex_;
    std::map<std::string, std::int64_t> values_;
};

std::string describe_warnings(const std::vector<ParseWarning>& warnings)
{
    std::string out;
    for (const auto& w : warnings) {
        if (!out.empty()) {
            out += "; ";
        }
        out += w.location + ": " + w.message;
    }
    return out;
}

} // namespace

Pipeline::Pipeline(EdgarClient& client, ObjectStore& objects, MetadataStore& metadata, PipelineConfig config,
                   const ExternalExtractor* extractor)
    : client_(client), objects_(objects), metadata_(metadata), config_(std::move(config)), extractor_(extractor)
{
    if (config_.worker_count == 0) {
        throw Error(ErrorCode::InvalidConfig, "pipeline.worker_count must be at least 1");
    }
    if (!config_.today) {
        config_.today = utc_today;
    }
}

ExecuteOptions Pipeline::execute_options() const
{
    return {config_.worker_count, config_.retry_limit, config_.stop_after};
}

// ---- index download -------------------------------------------------------

JobOutcome Pipeline::download_index(const IndexDescriptor& descriptor)
{
    const auto existing = metadata_.filing_index(descriptor.path);
    if (existing && existing->is_processed) {
        return JobOutcome::skip("already processed");
    }
    std::string raw;
    try {
        raw = client_.fetch(descriptor.path);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotFound || e.code() == ErrorCode::AccessDenied) {
            metadata_.mark_filing_index_error(descriptor.path, e.what(), std::nullopt);
            return JobOutcome::fail(e.what());
        }
        throw;
    }
    objects_.put(key_for_raw_filing(descriptor.path), raw, config_.compress_objects);
    IndexParseReport parsed;
    try {
        parsed = parse_index(raw);
    } catch (const Error& e) {
        metadata_.mark_filing_index_error(descriptor.path, e.what(), config_.today());
        return JobOutcome::fail(e.what());
    }
    metadata_.mark_filing_index_processed(descriptor.path, static_cast<std::int64_t>(parsed.rows.size()),
                                          config_.today());
    return JobOutcome::ok(std::to_string(parsed.rows.size()) + " rows, " +
                          std::to_string(parsed.malformed_lines.size()) + " malformed");
}

RunReport Pipeline::download_filing_index_data(std::optional<int> year, std::optional<int> quarter)
{
    std::map<std::string, IndexDescriptor> by_path;
    std::vector<JobSpec> jobs;
    for (auto& descriptor : client_.list_index_files(year, quarter)) {
        if (std::find(config_.index_types.begin(), config_.index_types.end(), descriptor.index_type) ==
            config_.index_types.end()) {
            continue;
        }
        metadata_.register_filing_index(descriptor);
        jobs.push_back({JobKind::download_index, descriptor.path, 0});
        by_path.emplace(descriptor.path, std::move(descriptor));
    }
    auto report = execute(
        std::move(jobs), [&](const JobSpec& job) { return download_index(by_path.at(job.subject)); },
        execute_options());
    report.operation = "download_filing_index_data";
    return report;
}

// ---- filings --------------------------------------------------------------

JobOutcome Pipeline::process_filing(const FilingSource& source)
{
    const auto existing = metadata_.filing(source.accession_number);
    if (existing && existing->is_processed) {
        return JobOutcome::skip("already processed");
    }
    std::string raw;
    try {
        raw = client_.fetch(source.edgar_path);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::NotFound || e.code() == ErrorCode::AccessDenied) {
            metadata_.mark_filing_error(source, e.what());
            return JobOutcome::fail(e.what());
        }
        throw;
    }
    const auto raw_key = key_for_raw_filing(source.edgar_path);
    objects_.put(raw_key, raw, config_.compress_objects);

    ParsedFiling parsed;
    try {
        parsed = parse_filing(raw);
    } catch (const Error& e) {
        metadata_.mark_filing_error(source, e.what(), raw_key);
        return JobOutcome::fail(e.what());
    }
    if (!parsed.header) {
        const auto detail = "no usable header: " + describe_warnings(parsed.warnings);
        metadata_.mark_filing_error(source, detail, raw_key);
        return JobOutcome::fail(detail);
    }
    if (parsed.header->accession_number != source.accession_number) {
        const auto detail = "header accession " + parsed.header->accession_number + " does not match index";
        metadata_.mark_filing_error(source, detail, raw_key);
        return JobOutcome::fail(detail);
    }
    for (const auto& doc : parsed.documents) {
        objects_.put(key_for_document(doc.sha1), doc.body, config_.compress_objects);
    }
    if (parsed.header->cik && *parsed.header->cik != source.cik) {
        metadata_.upsert_company(*parsed.header->cik,
                                 parsed.header->date_filed.value_or(source.date_filed.value_or(config_.today())));
    }
    metadata_.ingest_filing(parsed, raw_key, source);
    return JobOutcome::ok(std::to_string(parsed.documents.size()) + " documents, " +
                          std::to_string(parsed.warnings.size()) + " warnings");
}

RunReport Pipeline::process_all_filing_index(std::optional<int> year, std::optional<std::set<std::string>> form_types,
                                             std::optional<int> quarter)
{
    std::optional<std::set<std::string>> wanted;
    if (form_types) {
        wanted.emplace();
        for (const auto& t : *form_types) {
            wanted->insert(to_upper_ascii(trim(t)));
        }
    }

    Counters counters;
    std::map<std::string, FilingSource> sources;   // keyed and ordered by accession
    for (const auto& index : metadata_.filing_indexes(year)) {
        if (!index.is_processed || (quarter && index.quarter != *quarter)) {
            continue;
        }
        IndexParseReport parsed;
        try {
            parsed = parse_index(objects_.get(key_for_raw_filing(index.edgar_path)));
        } catch (const Error& e) {
            spdlog::warn("cannot re-read index {}: {}", index.edgar_path, e.what());
            counters.add("indexes_unreadable");
            continue;
        }
        for (const auto& row : parsed.rows) {
            if (wanted && !wanted->count(row.form_type)) {
                continue;
            }
            const auto accession = accession_from_path(row.file_name);
            if (!accession) {
                counters.add("rows_without_accession");
                continue;
            }
            metadata_.upsert_company(row.cik, row.date_filed);
            sources.try_emplace(*accession, FilingSource{*accession, row.cik, row.form_type, row.date_filed, row.file_name});
        }
    }

    std::vector<JobSpec> jobs;
    for (const auto& [accession, source] : sources) {
        jobs.push_back({JobKind::process_filing, accession, 0});
    }
    auto report = execute(
        std::move(jobs), [&](const JobSpec& job) { return process_filing(sources.at(job.subject)); },
        execute_options());
    counters.merge_into(report);
    report.operation = "process_all_filing_index";
    return report;
}

// ---- companies ------------------------------------------------------------

RunReport Pipeline::update_company_metadata()
{
    Counters counters;
    std::vector<JobSpec> jobs;
    for (const auto& company : metadata_.companies()) {
        jobs.push_back({JobKind::update_companies, std::to_string(company.cik), 0});
    }
    auto report = execute(
        std::move(jobs),
        [&](const JobSpec& job) {
            const auto cik = std::stoull(job.subject);
            std::string body;
            try {
                body = client_.fetch_company_metadata(cik);
            } catch (const Error& e) {
                if (e.code() == ErrorCode::NotFound || e.code() == ErrorCode::AccessDenied) {
                    return JobOutcome::fail(e.what());
                }
                throw;
            }
            CompanyMetadata meta;
            try {
                meta = parse_company_metadata(body);
            } catch (const Error& e) {
                return JobOutcome::fail(e.what());
            }
            const auto result = metadata_.append_company_info(cik, meta.name, meta.state_of_incorporation, meta.sic,
                                                              config_.today());
            if (!result.appended) {
                return JobOutcome::skip("unchanged");
            }
            counters.add("company_info_appended");
            return JobOutcome::ok("appended");
        },
        execute_options());
    counters.merge_into(report);
    report.operation = "update_company_metadata";
    return report;
}

// ---- text -----------------------------------------------------------------

RunReport Pipeline::extract_all_text()
{
    Counters counters;
    std::map<std::string, std::string> content_types;
    std::vector<JobSpec> jobs;
    for (auto& pending : metadata_.pending_extractions(std::nullopt, config_.retry_unextracted)) {
        jobs.push_back({JobKind::extract_text, pending.sha1, 0});
        content_types.emplace(pending.sha1, std::move(pending.content_type));
    }
    auto report = execute(
        std::move(jobs),
        [&](const JobSpec& job) {
            const auto outcome = extract_body(job.subject, content_types.at(job.subject), metadata_, objects_,
                                              extractor_, config_.compress_objects);
            counters.add("rows_marked", static_cast<std::int64_t>(outcome.rows_marked));
            if (outcome.computed) {
                counters.add("computations");
            }
            switch (outcome.status) {
            case ExtractionStatus::extracted:
                return outcome.computed ? JobOutcome::ok() : JobOutcome::skip("text already stored");
            case ExtractionStatus::unextracted:
                counters.add("unextracted");
                return JobOutcome::skip(outcome.detail.value_or("unextracted"));
            case ExtractionStatus::failed:
                break;
            }
            return JobOutcome::fail(outcome.detail.value_or("extraction failed"));
        },
        execute_options());
    counters.merge_into(report);
    report.operation = "extract_all_text";
    return report;
}

// ---- search ---------------------------------------------------------------

SearchRun Pipeline::run_search(const std::vector<SearchTermSpec>& terms, const DocumentScope& scope)
{
    if (terms.empty()) {
        throw Error(ErrorCode::InvalidArgument, "search needs at least one term");
    }
    std::map<std::string, bool> flags;
    for (const auto& t : terms) {
        if (t.term.empty()) {
            throw Error(ErrorCode::InvalidArgument, "search term is empty");
        }
        const auto [it, inserted] = flags.emplace(t.term, t.case_sensitive);
        if (!inserted && it->second != t.case_sensitive) {
            throw Error(ErrorCode::InvalidArgument, "term '" + t.term + "' given both case-sensitive and not");
        }
    }
    std::vector<SearchQueryTerm> query_terms;
    for (const auto& [term, case_sensitive] : flags) {
        query_terms.push_back({term, case_sensitive});
    }

    SearchRun run;
    const auto query = metadata_.upsert_search_query(search_label(terms, scope), config_.today(), query_terms);
    run.query_id = query.id;

    const auto documents = metadata_.documents_in_scope(scope, true);
    std::map<std::string, const FilingDocument*> by_subject;
    std::vector<JobSpec> jobs;
    for (const auto& doc : documents) {
        auto subject = doc.accession_number + "/" + std::to_string(doc.sequence);
        jobs.push_back({JobKind::search, subject, 0});
        by_subject.emplace(std::move(subject), &doc);
    }

    std::mutex results_mutex;
    std::vector<SearchQueryResult> results;
    std::vector<SearchHit> hits;
    run.report = execute(
        std::move(jobs),
        [&](const JobSpec& job) {
            const auto& doc = *by_subject.at(job.subject);
            const auto text = objects_.get(key_for_text(doc.sha1));
            std::vector<SearchQueryResult> local;
            std::vector<SearchHit> local_hits;
            for (const auto& [term, case_sensitive] : flags) {
                const auto count = count_occurrences(text, term, case_sensitive);
                local.push_back({term, doc.accession_number, doc.sequence, count});
                if (count > 0) {
                    local_hits.push_back({doc.accession_number, doc.sequence, doc.sha1, term, count});
                }
            }
            std::lock_guard lock(results_mutex);
            results.insert(results.end(), local.begin(), local.end());
            hits.insert(hits.end(), local_hits.begin(), local_hits.end());
            return JobOutcome::ok();
        },
        execute_options());

    const auto order = [](const auto& a, const auto& b) {
        return std::tie(a.accession_number, a.sequence, a.term) < std::tie(b.accession_number, b.sequence, b.term);
    };
    std::sort(results.begin(), results.end(), order);
    std::sort(hits.begin(), hits.end(), order);
    metadata_.save_search_results(run.query_id, results);
    run.hits = std::move(hits);
    run.report.operation = "run_search";
    run.report.counters["documents_scanned"] = static_cast<std::int64_t>(documents.size());
    run.report.counters["hits"] = static_cast<std::int64_t>(run.hits.size());
    return run;
}

} // namespace edgar
