#include <doctest.h>

#include <edgar/digest.hpp>
#include <edgar/error.hpp>
#include <edgar/filing_parser.hpp>

#include "test_support.hpp"

using namespace edgar;
using namespace std::chrono;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an edgar::Error");
    return ErrorCode::InvalidArgument;
}

Date d(int y, unsigned m, unsigned day) { return year{y} / month{m} / std::chrono::day{day}; }

ParsedDocument doc(std::uint32_t sequence, std::string body, std::optional<std::string> description = std::nullopt)
{
    ParsedDocument out;
    out.sequence = sequence;
    out.doc_type = "EX-" + std::to_string(sequence);
    out.description = std::move(description);
    out.sha1 = sha1_hex(body);
    out.body = std::move(body);
    out.content_type = "text/plain";
    return out;
}

ParsedFiling filing(const std::string& accession, std::uint64_t cik, const std::string& form,
                    std::vector<ParsedDocument> documents)
{
    ParsedFiling out;
    out.header = FilingHeader{};
    out.header->accession_number = accession;
    out.header->cik = cik;
    out.header->form_type = form;
    out.header->date_filed = d(2018, 3, 1);
    out.documents = std::move(documents);
    return out;
}

FilingSource source_for(const ParsedFiling& f)
{
    return {f.header->accession_number, *f.header->cik, f.header->form_type, f.header->date_filed,
            "edgar/data/" + std::to_string(*f.header->cik) + "/" + f.header->accession_number + ".txt"};
}

void ingest(MetadataStore& store, const ParsedFiling& f)
{
    const auto src = source_for(f);
    store.upsert_company(src.cik, *src.date_filed);
    store.ingest_filing(f, "filings/raw/" + src.edgar_path, src);
}

} // namespace

TEST_CASE("empty store")
{
    MetadataStore store(":memory:");
    for (const auto& [table, count] : store.row_counts()) {
        CAPTURE(table);
        CHECK(count == 0);
    }
    CHECK(store.row_counts().size() == 8);
    CHECK(store.find_filings().empty());
    CHECK(store.find_documents_by_description("x", 10).empty());
    CHECK(store.pending_extractions(std::nullopt, false).empty());
    CHECK(store.dump() == MetadataStore(":memory:").dump());
}

TEST_CASE("company upsert is idempotent and keeps the earliest sighting")
{
    MetadataStore store(":memory:");
    store.upsert_company(320193, d(2018, 2, 1));
    const auto once = store.dump();
    store.upsert_company(320193, d(2018, 2, 1));
    CHECK(store.dump() == once);
    store.upsert_company(320193, d(2018, 3, 1));
    CHECK(store.company(320193)->date_first_seen == d(2018, 2, 1));
    store.upsert_company(320193, d(2017, 12, 31));
    CHECK(store.company(320193)->date_first_seen == d(2017, 12, 31));
    CHECK(code_of([&] { store.upsert_company(0, d(2018, 1, 1)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("company_info is a history")
{
    MetadataStore store(":memory:");
    CHECK(code_of([&] { store.append_company_info(1, "X", std::nullopt, std::nullopt, d(2018, 1, 1)); }) ==
          ErrorCode::ConstraintViolation);
    store.upsert_company(789019, d(2018, 1, 1));
    CHECK(store.append_company_info(789019, "MICRO CORP", "WA", "7372", d(2018, 1, 1)).appended);
    CHECK_FALSE(store.append_company_info(789019, "MICRO CORP", "WA", "7372", d(2018, 2, 1)).appended);
    CHECK(store.append_company_info(789019, "NORTHWIND CLOUD CORP", "WA", "7372", d(2018, 3, 1)).appended);
    const auto history = store.company_info_history(789019);
    REQUIRE(history.size() == 2);
    CHECK(history[0].name == "MICRO CORP");
    CHECK(history[1].name == "NORTHWIND CLOUD CORP");
    CHECK(store.latest_company_info(789019)->name == "NORTHWIND CLOUD CORP");
    CHECK(store.row_counts().at("company_info") == 2);
}

TEST_CASE("filing index transitions")
{
    MetadataStore store(":memory:");
    const IndexDescriptor desc{2018, 1, IndexType::master, "edgar/full-index/2018/QTR1/master.idx"};
    CHECK(code_of([&] { store.mark_filing_index_processed(desc.path, 3, d(2018, 6, 30)); }) ==
          ErrorCode::IllegalTransition);
    const auto registered = store.register_filing_index(desc);
    CHECK_FALSE(registered.is_processed);
    CHECK_FALSE(registered.is_error);
    CHECK(store.register_filing_index(desc) == registered);

    auto errored = store.mark_filing_index_error(desc.path, "boom", d(2018, 6, 30));
    CHECK(errored.is_error);
    CHECK_FALSE(errored.is_processed);
    CHECK(errored.error_detail == "boom");

    auto done = store.mark_filing_index_processed(desc.path, 12, d(2018, 6, 30));
    CHECK(done.is_processed);
    CHECK_FALSE(done.is_error);
    CHECK(done.row_count == 12);
    CHECK_FALSE(done.error_detail);
    CHECK(store.register_filing_index(desc) == done);

    CHECK(code_of([&] { store.register_filing_index({2018, 5, IndexType::master, "x"}); }) == ErrorCode::InvalidArgument);
    CHECK(store.filing_indexes(2018).size() == 1);
    CHECK(store.filing_indexes(2017).empty());
}

TEST_CASE("recording the minimal fixture")
{
    MetadataStore store(":memory:");
    const auto parsed = parse_filing(test::read_file(test::fixture("unit/minimal_filing.txt")));
    const FilingSource source{parsed.header->accession_number, 1, "10-K", d(2018, 1, 2), "edgar/data/1/x.txt"};
    store.upsert_company(1, d(2018, 1, 2));
    const auto f = store.ingest_filing(parsed, "filings/raw/edgar/data/1/x.txt", source);
    CHECK(f.is_processed);
    CHECK(f.document_count == 2);
    const auto docs = store.documents_for(f.accession_number);
    REQUIRE(docs.size() == 2);
    const auto& expected = test::manifest()["unit"]["minimal_filing"]["documents"];
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(docs[i].sha1 == expected[i]["sha1"].get<std::string>());
        CHECK(docs[i].extract_state == ExtractState::pending);
        CHECK_FALSE(docs[i].is_extracted);
    }
    const auto before = store.dump();
    store.ingest_filing(parsed, "filings/raw/edgar/data/1/x.txt", source);
    CHECK(store.dump() == before);
}

TEST_CASE("documents sharing a body")
{
    MetadataStore store(":memory:");
    ingest(store, filing("0000000010-18-000001", 10, "8-K", {doc(1, "cover a"), doc(2, "SHARED", "CODE OF ETHICS")}));
    ingest(store, filing("0000000011-18-000002", 11, "10-K", {doc(1, "cover b"), doc(2, "SHARED", "Code of Ethics")}));
    ingest(store, filing("0000000012-18-000003", 12, "SC 13G", {doc(1, "cover c"), doc(2, "SHARED", "code of ethics")}));
    const auto pending = store.pending_extractions(std::nullopt, false);
    CHECK(pending.size() == 4);
    const auto shared = std::find_if(pending.begin(), pending.end(), [](const auto& p) { return p.sha1 == sha1_hex("SHARED"); });
    REQUIRE(shared != pending.end());
    CHECK(shared->document_count == 3);
    CHECK(store.set_extract_state(sha1_hex("SHARED"), ExtractState::extracted) == 3);
    CHECK(store.pending_extractions(std::nullopt, false).size() == 3);

    CHECK(store.find_documents_by_description("ethics", 10).size() == 3);
    CHECK(store.find_documents_by_description("ETHICS", 2).size() == 2);
    CHECK(store.find_documents_by_description("nothing like it", 10).empty());
    CHECK(code_of([&] { store.find_documents_by_description("ethics", 0); }) == ErrorCode::InvalidArgument);

    CHECK(store.documents_in_scope({"ethics", "10-k", std::nullopt}, true).size() == 1);
    CHECK(store.documents_in_scope({}, true).size() == 3);
    CHECK(store.documents_in_scope({}, false).size() == 6);
}

TEST_CASE("unextracted bodies are only retried on request")
{
    MetadataStore store(":memory:");
    ingest(store, filing("0000000010-18-000001", 10, "8-K", {doc(1, "pdf bytes"), doc(2, "failing")}));
    store.set_extract_state(sha1_hex("pdf bytes"), ExtractState::unextracted, "no extractor");
    store.set_extract_state(sha1_hex("failing"), ExtractState::failed, "503");
    const auto normal = store.pending_extractions(std::nullopt, false);
    REQUIRE(normal.size() == 1);
    CHECK(normal[0].sha1 == sha1_hex("failing"));
    CHECK(store.pending_extractions(std::nullopt, true).size() == 2);
    CHECK(store.pending_extractions(1, true).size() == 1);
    CHECK(store.documents_for("0000000010-18-000001")[0].extract_detail == "no extractor");
}

TEST_CASE("filing queries match the fixture manifest")
{
    test::Harness h;
    h.ingest_all();
    std::vector<std::string> expected;
    for (const auto& a : test::manifest()["ten_k_accessions"]) {
        expected.push_back(a.get<std::string>());
    }
    std::vector<std::string> got;
    for (const auto& f : h.metadata().find_filings({"10-K", std::nullopt, std::nullopt, std::nullopt})) {
        if (f.is_processed) {
            got.push_back(f.accession_number);
        }
    }
    std::sort(got.begin(), got.end());
    std::sort(expected.begin(), expected.end());
    CHECK(got == expected);

    const auto in_feb = h.metadata().find_filings({std::nullopt, d(2018, 2, 1), d(2018, 2, 28), std::nullopt});
    for (const auto& f : in_feb) {
        REQUIRE(f.date_filed);
        CHECK(*f.date_filed >= d(2018, 2, 1));
        CHECK(*f.date_filed <= d(2018, 2, 28));
    }
    const auto by_cik = h.metadata().find_filings({std::nullopt, std::nullopt, std::nullopt, 320193});
    for (const auto& f : by_cik) {
        CHECK(f.cik == 320193u);
    }
    std::size_t manifest_320193 = 0;
    for (const auto& [acc, f] : test::manifest()["filings"].items()) {
        manifest_320193 += f["cik"].get<std::uint64_t>() == 320193u;
    }
    CHECK(by_cik.size() == manifest_320193);
}

TEST_CASE("search results")
{
    MetadataStore store(":memory:");
    ingest(store, filing("0000000010-18-000001", 10, "8-K", {doc(1, "alpha"), doc(2, "beta")}));
    const SearchQueryTerm terms[] = {{"alpha", false}, {"Beta", true}};
    const auto q = store.upsert_search_query("q1", d(2018, 6, 30), terms);
    CHECK(store.upsert_search_query("q1", d(2018, 7, 1), terms).id == q.id);
    CHECK(store.search_query(q.id)->terms.size() == 2);

    const std::vector<SearchQueryResult> results = {{"alpha", "0000000010-18-000001", 1, 2},
                                                    {"alpha", "0000000010-18-000001", 2, 0},
                                                    {"Beta", "0000000010-18-000001", 2, 1}};
    CHECK(store.save_search_results(q.id, results) == 2);
    const auto before = store.dump();
    CHECK(store.save_search_results(q.id, results) == 2);
    CHECK(store.dump() == before);
    CHECK(store.search_results(q.id).size() == 2);
    CHECK(store.row_counts().at("search_query_result") == 2);

    const std::vector<SearchQueryResult> cleared = {{"alpha", "0000000010-18-000001", 1, 0}};
    store.save_search_results(q.id, cleared);
    CHECK(store.search_results(q.id).size() == 1);

    const std::vector<SearchQueryResult> dangling = {{"alpha", "0000000099-18-000001", 1, 3}};
    CHECK(code_of([&] { store.save_search_results(q.id, dangling); }) == ErrorCode::ConstraintViolation);
    const std::vector<SearchQueryResult> unknown_term = {{"gamma", "0000000010-18-000001", 1, 3}};
    CHECK(code_of([&] { store.save_search_results(q.id, unknown_term); }) == ErrorCode::ConstraintViolation);
    const std::vector<SearchQueryResult> negative = {{"alpha", "0000000010-18-000001", 1, -1}};
    CHECK(code_of([&] { store.save_search_results(q.id, negative); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("documents need their filing")
{
    MetadataStore store(":memory:");
    const std::vector<ParsedDocument> docs = {doc(1, "x")};
    CHECK(code_of([&] { store.record_documents("0000000010-18-000001", docs); }) == ErrorCode::ConstraintViolation);
    CHECK(code_of([&] { store.mark_filing_processed("0000000010-18-000001"); }) == ErrorCode::IllegalTransition);
}

TEST_CASE("dump is deterministic and insertion-order independent")
{
    const auto a = filing("0000000010-18-000001", 10, "8-K", {doc(1, "a1"), doc(2, "a2")});
    const auto b = filing("0000000011-18-000002", 11, "10-K", {doc(1, "b1")});
    MetadataStore x(":memory:");
    MetadataStore y(":memory:");
    ingest(x, a);
    ingest(x, b);
    ingest(y, b);
    ingest(y, a);
    CHECK(x.dump() == y.dump());
    CHECK(x.dump() == x.dump());
}

TEST_CASE("file-backed store persists across reopen")
{
    test::TempDir dir;
    const auto path = dir / "m.sqlite3";
    std::string dump;
    {
        MetadataStore store(path);
        ingest(store, filing("0000000010-18-000001", 10, "8-K", {doc(1, "a1")}));
        dump = store.dump();
    }
    MetadataStore reopened(path);
    CHECK(reopened.dump() == dump);
}
