#include "edgarctl/app.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <fstream>
#include <sstream>

#include <edgar/error.hpp>
#include <edgar/filing_parser.hpp>
#include <edgar/index_parser.hpp>
#include <edgar/text_codec.hpp>

namespace edgarctl {

namespace {

using edgar::Error;
using edgar::ErrorCode;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::NotFound, "cannot read " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return std::move(buffer).str();
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::StorageFailure, "cannot write " + path);
    }
    out << text;
    if (text.empty() || text.back() != '\n') {
        out << '\n';
    }
}

/// Routes library logging to `err` for the lifetime of one command.
class LogScope {
public:
    LogScope(std::ostream& err, const std::string& level) : previous_(spdlog::default_logger())
    {
        auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true);
        auto logger = std::make_shared<spdlog::logger>("edgarctl", std::move(sink));
        logger->set_pattern("%Y-%m-%dT%H:%M:%S %l %v");
        logger->set_level(spdlog::level::from_str(level));
        spdlog::set_default_logger(std::move(logger));
    }
    ~LogScope() { spdlog::set_default_logger(previous_); }

    LogScope(const LogScope&) = delete;
    LogScope& operator=(const LogScope&) = delete;

private:
    std::shared_ptr<spdlog::logger> previous_;
};

int finish(const edgar::RunReport& report, const std::string& report_path, std::ostream& err)
{
    err << report.to_text();
    if (!report_path.empty()) {
        write_file(report_path, report.to_json());
    }
    return report.jobs_failed == 0 ? kExitOk : kExitPartialFailure;
}

} // namespace

std::unique_ptr<Runtime> open_runtime(const CliConfig& config)
{
    auto runtime = std::make_unique<Runtime>();
    runtime->config = config;
    runtime->transport = edgar::make_http_transport(config.client.timeout);
    runtime->client = std::make_unique<edgar::EdgarClient>(config.client, runtime->transport);

    edgar::ObjectStoreOptions options;
    options.quota_bytes = config.quota_bytes;
    options.rate_limit_signatures = config.client.rate_limit_signatures;
    if (config.access_denied_signature_file) {
        options.access_denied_signatures = edgar::load_signature_file(*config.access_denied_signature_file);
    }
    std::unique_ptr<edgar::StorageBackend> backend;
    if (config.store_backend == "s3") {
        backend = edgar::make_s3_backend(config.s3, runtime->transport);
        options.lock_dir = config.lock_dir;
    } else {
        backend = edgar::make_filesystem_backend(config.store_root);
        options.lock_dir = config.lock_dir.empty() ? config.store_root / "locks" : config.lock_dir;
    }
    runtime->objects = std::make_unique<edgar::ObjectStore>(std::move(backend), options);

    if (config.database.has_parent_path()) {
        std::filesystem::create_directories(config.database.parent_path());
    }
    runtime->metadata = std::make_unique<edgar::MetadataStore>(config.database);

    if (config.extractor_url) {
        runtime->extractor = std::make_unique<edgar::ExternalExtractor>(*config.extractor_url, runtime->transport);
    }

    edgar::PipelineConfig pipeline;
    pipeline.worker_count = config.worker_count;
    pipeline.retry_limit = config.retry_limit;
    pipeline.compress_objects = config.compress;
    pipeline.retry_unextracted = config.retry_unextracted;
    runtime->pipeline = std::make_unique<edgar::Pipeline>(*runtime->client, *runtime->objects, *runtime->metadata,
                                                          std::move(pipeline), runtime->extractor.get());
    return runtime;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, EnvLookup env)
{
    CLI::App app{"Build and maintain a local corpus of EDGAR filings", "edgarctl"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for every command");

    std::string config_file;
    std::vector<std::string> settings;
    std::map<std::string, std::string> overrides;
    std::string report_path;
    const auto flag_for = [&](const std::string& flag, const std::string& key, const std::string& help) {
        app.add_option_function<std::string>(
               flag, [&overrides, key](const std::string& value) { overrides[key] = value; }, help)
            ->type_name("VALUE");
    };
    app.add_option("--config", config_file, "JSON configuration file")->type_name("FILE");
    app.add_option("--set", settings, "Override one configuration key")->type_name("KEY=VALUE");
    flag_for("--db", "database.path", "SQLite database file");
    flag_for("--store-root", "store.root", "Object store directory");
    flag_for("--base-url", "edgar.base_url", "Archive root URL");
    flag_for("--metadata-base-url", "edgar.metadata_base_url", "Company metadata root URL");
    flag_for("--user-agent", "edgar.user_agent", "User-Agent naming a contact");
    flag_for("--workers", "pipeline.worker_count", "Worker threads");
    flag_for("--extractor-url", "extractor.url", "Text extraction service URL");
    flag_for("--log-level", "log.level", "trace, debug, info, warn, error or off");
    app.add_option("--report", report_path, "Write the run report as JSON")->type_name("FILE");

    std::optional<int> year;
    std::optional<int> quarter;
    auto* index = app.add_subcommand("index", "Full-index files")->require_subcommand(1);
    auto* index_download = index->add_subcommand("download", "Fetch and record index files");
    index_download->add_option("--year", year, "Only this year");
    index_download->add_option("--quarter", quarter, "Only this quarter (needs --year)")->check(CLI::Range(1, 4));

    std::vector<std::string> form_types;
    std::optional<int> process_quarter;
    auto* filings = app.add_subcommand("filings", "Filings listed in the indexes")->require_subcommand(1);
    auto* filings_process = filings->add_subcommand("process", "Fetch, parse and store listed filings");
    filings_process->add_option("--year", year, "Only indexes of this year");
    filings_process->add_option("--quarter", process_quarter, "Only this quarter")->check(CLI::Range(1, 4));
    filings_process->add_option("--form-type", form_types, "Form type to keep (repeatable)");

    auto* companies = app.add_subcommand("companies", "Company metadata")->require_subcommand(1);
    auto* companies_update = companies->add_subcommand("update", "Record company name, state and SIC changes");

    auto* text = app.add_subcommand("text", "Document text")->require_subcommand(1);
    auto* text_extract = text->add_subcommand("extract", "Extract text for pending document bodies");

    std::vector<std::string> terms;
    bool case_sensitive = false;
    edgar::DocumentScope scope;
    auto* search = app.add_subcommand("search", "Term search")->require_subcommand(1);
    auto* search_run = search->add_subcommand("run", "Count term occurrences per document");
    search_run->add_option("--term", terms, "Term to count (repeatable)")->required();
    search_run->add_flag("--case-sensitive", case_sensitive, "Match case exactly");
    search_run->add_option("--description-like", scope.description_like, "Only documents whose description contains this");
    search_run->add_option("--form-type", scope.form_type, "Only documents of filings with this form type");
    search_run->add_option("--limit", scope.limit, "At most this many documents");

    std::string predicate_text;
    std::string prefix;
    bool delete_hits = false;
    auto* store = app.add_subcommand("store", "Object store maintenance")->require_subcommand(1);
    auto* store_sweep = store->add_subcommand("sweep", "List (or delete) objects matching a predicate");
    store_sweep->add_option("--predicate", predicate_text, "rate-limited, empty or access-denied")
        ->required()
        ->check(CLI::IsMember({"rate-limited", "empty", "access-denied"}));
    store_sweep->add_option("--prefix", prefix, "Only keys under this prefix");
    store_sweep->add_flag("--delete", delete_hits, "Delete matches instead of listing them");

    auto* db = app.add_subcommand("db", "Metadata database")->require_subcommand(1);
    auto* db_stats = db->add_subcommand("stats", "Row counts and object store totals");
    auto* db_dump = db->add_subcommand("dump", "Every table in natural-key order");

    std::string audit_path;
    auto* audit = app.add_subcommand("audit", "Parse a local file and print what the parser sees")->require_subcommand(1);
    auto* audit_index = audit->add_subcommand("index", "Parse an index file");
    audit_index->add_option("file", audit_path, "Index file (plain or gzip)")->required()->check(CLI::ExistingFile);
    auto* audit_filing = audit->add_subcommand("filing", "Parse a filing container");
    audit_filing->add_option("file", audit_path, "Filing .txt file")->required()->check(CLI::ExistingFile);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (audit_index->parsed()) {
            const auto report = edgar::parse_index(read_file(audit_path));
            out << edgar::to_delimited_table(report.rows);
            for (const auto& bad : report.malformed_lines) {
                err << "line " << bad.line_number << ": " << bad.reason << '\n';
            }
            err << "format " << edgar::to_string(report.detected_format) << ", " << report.rows.size() << " rows, "
                << report.malformed_lines.size() << " malformed\n";
            return kExitOk;
        }
        if (audit_filing->parsed()) {
            out << edgar::to_audit_dump(edgar::parse_filing(read_file(audit_path)));
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitPartialFailure;
    }

    CliConfig config;
    try {
        for (const auto& setting : settings) {
            const auto eq = setting.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw Error(ErrorCode::InvalidConfig, "--set expects KEY=VALUE, got '" + setting + "'");
            }
            overrides[setting.substr(0, eq)] = setting.substr(eq + 1);
        }
        ConfigSources sources;
        if (!config_file.empty()) {
            sources.file = config_file;
        }
        sources.overrides = overrides;
        sources.env = std::move(env);
        config = load_config(sources);
    } catch (const Error& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    }

    LogScope logging(err, config.log_level);
    try {
        auto runtime = open_runtime(config);
        auto& pipeline = *runtime->pipeline;

        if (index_download->parsed()) {
            return finish(pipeline.download_filing_index_data(year, quarter), report_path, err);
        }
        if (filings_process->parsed()) {
            std::optional<std::set<std::string>> wanted;
            if (!form_types.empty()) {
                wanted.emplace();
                for (const auto& type : form_types) {
                    wanted->insert(std::string(edgar::trim(type)));
                }
            }
            return finish(pipeline.process_all_filing_index(year, wanted, process_quarter), report_path, err);
        }
        if (companies_update->parsed()) {
            return finish(pipeline.update_company_metadata(), report_path, err);
        }
        if (text_extract->parsed()) {
            return finish(pipeline.extract_all_text(), report_path, err);
        }
        if (search_run->parsed()) {
            std::vector<edgar::SearchTermSpec> specs;
            for (const auto& term : terms) {
                specs.push_back({term, case_sensitive});
            }
            const auto result = pipeline.run_search(specs, scope);
            out << "query " << result.query_id << '\n';
            for (const auto& hit : result.hits) {
                out << hit.accession_number << '\t' << hit.sequence << '\t' << hit.term << '\t' << hit.count << '\n';
            }
            return finish(result.report, report_path, err);
        }
        if (store_sweep->parsed()) {
            const auto predicate = *edgar::parse_sweep_predicate(predicate_text);
            const auto hits = runtime->objects->sweep(prefix, predicate, !delete_hits);
            nlohmann::ordered_json json;
            json["operation"] = "store_sweep";
            json["predicate"] = predicate_text;
            json["prefix"] = prefix;
            json["deleted"] = delete_hits;
            json["hits"] = nlohmann::json::array();
            for (const auto& hit : hits) {
                out << hit.key << '\t' << hit.reason << '\n';
                json["hits"].push_back({{"key", hit.key}, {"reason", hit.reason}});
            }
            err << "store sweep " << predicate_text << ": " << hits.size() << (delete_hits ? " deleted" : " matched")
                << '\n';
            if (!report_path.empty()) {
                write_file(report_path, json.dump(2));
            }
            return kExitOk;
        }
        if (db_stats->parsed()) {
            for (const auto& [table, count] : runtime->metadata->row_counts()) {
                out << table << '\t' << count << '\n';
            }
            const auto stats = runtime->objects->stats();
            out << "objects\t" << stats.object_count << '\n'
                << "stored_bytes\t" << stats.total_stored_bytes << '\n'
                << "logical_bytes\t" << stats.total_logical_bytes << '\n';
            return kExitOk;
        }
        if (db_dump->parsed()) {
            out << runtime->metadata->dump();
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.code() == ErrorCode::InvalidConfig) {
            return kExitConfig;
        }
        return e.code() == ErrorCode::InvalidArgument ? kExitUsage : kExitPartialFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitPartialFailure;
    }
    return kExitUsage;
}

} // namespace edgarctl
