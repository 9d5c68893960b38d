#include <doctest.h>

#include <fstream>
#include <sstream>

#include <edgar/error.hpp>
#include <edgarctl/app.hpp>
#include <edgarctl/config.hpp>

#include "test_support.hpp"

using namespace edgar;

namespace {

edgarctl::EnvLookup env_of(std::map<std::string, std::string> vars)
{
    return [vars = std::move(vars)](const std::string& name) -> std::optional<std::string> {
        const auto it = vars.find(name);
        return it == vars.end() ? std::nullopt : std::optional<std::string>(it->second);
    };
}

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

/// Runs edgarctl against a mock archive with stores in `dir`.
struct Cli {
    test::TempDir dir;
    mock::MockEdgarServer server{test::fixture("mock_edgar")};

    Cli() { server.start(); }

    std::map<std::string, std::string> env() const
    {
        return {{"EDGAR_BASE_URL", server.base_url()},
                {"EDGAR_METADATA_BASE_URL", server.metadata_base_url()},
                {"EDGAR_USER_AGENT", "edgar-tests test@example.com"},
                {"EDGAR_MAX_REQUESTS_PER_SECOND", "2000"},
                {"EDGAR_BACKOFF_BASE_MS", "1"},
                {"EDGAR_BACKOFF_CAP_MS", "5"},
                {"EDGAR_DATABASE_PATH", (dir / "metadata.sqlite3").string()},
                {"EDGAR_STORE_ROOT", (dir / "objects").string()},
                {"EDGAR_LOG_LEVEL", "off"}};
    }

    Result operator()(std::vector<std::string> args)
    {
        std::ostringstream out;
        std::ostringstream err;
        const auto code = edgarctl::run(args, out, err, env_of(env()));
        return {code, out.str(), err.str()};
    }
};

void write(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
}

} // namespace

TEST_CASE("environment variable names")
{
    CHECK(edgarctl::env_name_for("edgar.user_agent") == "EDGAR_USER_AGENT");
    CHECK(edgarctl::env_name_for("store.s3.bucket") == "EDGAR_STORE_S3_BUCKET");
    CHECK(edgarctl::env_name_for("database.path") == "EDGAR_DATABASE_PATH");
    for (const auto& key : edgarctl::config_keys()) {
        CHECK(std::string(key.description).size() > 0);
    }
}

TEST_CASE("configuration precedence: defaults < file < env < flags")
{
    test::TempDir dir;
    write(dir / "c.json", R"({"edgar": {"user_agent": "file ua", "max_retries": 7},
                             "pipeline": {"worker_count": 3}, "database": {"path": "from-file.db"}})");
    edgarctl::ConfigSources sources;
    sources.file = dir / "c.json";
    sources.env = env_of({{"EDGAR_USER_AGENT", "env ua"}, {"EDGAR_PIPELINE_WORKER_COUNT", "5"}});
    sources.overrides = {{"pipeline.worker_count", "9"}};
    const auto config = edgarctl::load_config(sources);
    CHECK(config.client.user_agent == "env ua");
    CHECK(config.client.max_retries == 7);
    CHECK(config.worker_count == 9);
    CHECK(config.database == "from-file.db");
    CHECK(config.retry_limit == 2);
    CHECK(config.store_backend == "filesystem");
}

TEST_CASE("invalid configuration names the key")
{
    const auto fails_with = [](edgarctl::ConfigSources sources, const std::string& key) {
        try {
            edgarctl::load_config(sources);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidConfig);
            CHECK(std::string(e.what()).find(key) != std::string::npos);
            return;
        }
        FAIL("expected InvalidConfig for " << key);
    };
    edgarctl::ConfigSources base;
    base.env = env_of({{"EDGAR_USER_AGENT", "x y@z"}});
    auto s = base;
    s.overrides = {{"pipeline.worker_count", "zero"}};
    fails_with(s, "pipeline.worker_count");
    s.overrides = {{"pipeline.worker_count", "0"}};
    fails_with(s, "pipeline.worker_count");
    s.overrides = {{"no.such.key", "1"}};
    fails_with(s, "no.such.key");
    s.overrides = {{"store.backend", "s3"}};
    fails_with(s, "store.s3");
    s = {};
    s.env = env_of({});
    fails_with(s, "edgar.user_agent");
}

TEST_CASE("exit codes")
{
    Cli cli;
    CHECK(cli({"index", "frobnicate"}).code == edgarctl::kExitUsage);
    CHECK(cli({}).code == edgarctl::kExitUsage);
    CHECK(cli({"--help"}).code == edgarctl::kExitOk);
    const auto bad = cli({"--set", "pipeline.worker_count=-3", "db", "stats"});
    CHECK(bad.code == edgarctl::kExitConfig);
    CHECK(bad.err.find("pipeline.worker_count") != std::string::npos);
    CHECK(cli({"--set", "nonsense", "db", "stats"}).code == edgarctl::kExitConfig);
    CHECK(cli({"index", "download", "--year", "2018", "--quarter", "7"}).code == edgarctl::kExitUsage);
}

TEST_CASE("commands map onto pipeline operations")
{
    Cli cli;
    const auto year = test::manifest()["year"].get<int>();
    const auto download = cli({"index", "download", "--year", std::to_string(year)});
    CHECK(download.code == edgarctl::kExitPartialFailure);
    const auto process = cli({"filings", "process", "--year", std::to_string(year), "--form-type", "10-K"});
    CHECK(process.code == edgarctl::kExitOk);

    test::Harness h;
    h.pipeline().download_filing_index_data(year);
    h.pipeline().process_all_filing_index(year, std::set<std::string>{"10-K"});

    MetadataStore cli_db(cli.dir / "metadata.sqlite3");
    CHECK(cli_db.row_counts() == h.metadata().row_counts());
    auto strip_dates = [](std::vector<FilingIndex> v) {
        for (auto& i : v) {
            i.date_downloaded.reset();
        }
        return v;
    };
    CHECK(strip_dates(cli_db.filing_indexes()) == strip_dates(h.metadata().filing_indexes()));
    CHECK(cli_db.find_filings() == h.metadata().find_filings());
    for (const auto& f : cli_db.find_filings()) {
        CHECK(cli_db.documents_for(f.accession_number) == h.metadata().documents_for(f.accession_number));
    }
    ObjectStore cli_objects(make_filesystem_backend(cli.dir / "objects"));
    CHECK(test::object_listing(cli_objects) == test::object_listing(h.objects()));

    const auto stats = cli({"db", "stats"});
    CHECK(stats.code == 0);
    CHECK(stats.out.find("filing\t" + std::to_string(cli_db.row_counts().at("filing"))) != std::string::npos);
}

TEST_CASE("search output agrees with a brute-force count")
{
    Cli cli;
    const auto year = std::to_string(test::manifest()["year"].get<int>());
    cli({"index", "download", "--year", year});
    cli({"filings", "process", "--year", year});
    cli({"text", "extract"});
    const auto report_path = (cli.dir / "search.json").string();
    const auto result = cli({"--report", report_path, "search", "run", "--term", "agreement", "--term", "Company"});
    REQUIRE(result.code == 0);
    std::istringstream lines(result.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line.rfind("query ", 0) == 0);

    MetadataStore db(cli.dir / "metadata.sqlite3");
    ObjectStore objects(make_filesystem_backend(cli.dir / "objects"));
    std::map<std::string, std::int64_t> expected;
    for (const auto& doc : db.documents_in_scope({}, true)) {
        const auto text = objects.get(key_for_text(doc.sha1));
        for (const auto* term : {"Company", "agreement"}) {
            const auto n = test::brute_force_count(text, term, false);
            if (n > 0) {
                expected[doc.accession_number + "\t" + std::to_string(doc.sequence) + "\t" + term] = n;
            }
        }
    }
    std::map<std::string, std::int64_t> got;
    while (std::getline(lines, line)) {
        const auto tab = line.rfind('\t');
        got[line.substr(0, tab)] = std::stoll(line.substr(tab + 1));
    }
    CHECK(got == expected);
    CHECK_FALSE(got.empty());

    const auto json = nlohmann::json::parse(test::read_file(report_path));
    CHECK(json["operation"] == "run_search");
    CHECK(json["jobs_failed"] == 0);
    CHECK(json["counters"]["hits"] == got.size());
}

TEST_CASE("store sweep dry run deletes nothing")
{
    Cli cli;
    ObjectStore objects(make_filesystem_backend(cli.dir / "objects"));
    objects.put("filings/raw/bad.txt", test::read_file(test::fixture("unit/throttle.html")), true);
    objects.put("filings/raw/good.txt", "fine", true);
    const auto before = test::object_listing(objects);
    const auto report_path = (cli.dir / "sweep.json").string();
    const auto dry = cli({"--report", report_path, "store", "sweep", "--predicate", "rate-limited"});
    CHECK(dry.code == 0);
    CHECK(dry.out == "filings/raw/bad.txt\trate-limit error page\n");
    CHECK(test::object_listing(objects) == before);
    const auto json = nlohmann::json::parse(test::read_file(report_path));
    CHECK(json["deleted"] == false);
    CHECK(json["hits"].size() == 1);

    CHECK(cli({"store", "sweep", "--predicate", "rate-limited", "--delete"}).code == 0);
    CHECK_FALSE(objects.exists("filings/raw/bad.txt"));
    CHECK(objects.exists("filings/raw/good.txt"));
    CHECK(cli({"store", "sweep", "--predicate", "bogus"}).code == edgarctl::kExitUsage);
}

TEST_CASE("audit commands need no configuration")
{
    std::ostringstream out;
    std::ostringstream err;
    const auto code = edgarctl::run({"audit", "filing", test::fixture("unit/minimal_filing.txt").string()}, out, err,
                                    env_of({}));
    CHECK(code == 0);
    CHECK(out.str().find("accession_number: 0000000001-18-000001") != std::string::npos);

    std::ostringstream idx_out;
    const auto idx_code = edgarctl::run(
        {"audit", "index", test::fixture("mock_edgar/archives/edgar/full-index/2018/QTR1/master.idx").string()}, idx_out,
        err, env_of({}));
    CHECK(idx_code == 0);
    const auto table = idx_out.str();
    CHECK(std::count(table.begin(), table.end(), '\n') >= 12);
}
