#include <doctest.h>

#include <random>

#include <edgar/content_type.hpp>
#include <edgar/digest.hpp>
#include <edgar/error.hpp>
#include <edgar/filing_parser.hpp>
#include <edgar/uucodec.hpp>

#include "test_support.hpp"

using namespace edgar;

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

std::size_t count_lines_starting(const std::string& raw, const std::string& tag)
{
    std::size_t count = 0;
    std::size_t pos = 0;
    while (pos < raw.size()) {
        const auto end = std::min(raw.find('\n', pos), raw.size());
        const auto first = raw.find_first_not_of(" \t", pos);
        if (first < end && raw.compare(first, tag.size(), tag) == 0) {
            ++count;
        }
        pos = end + 1;
    }
    return count;
}

std::size_t unparseable(const ParsedFiling& filing)
{
    return static_cast<std::size_t>(std::count_if(filing.warnings.begin(), filing.warnings.end(), [](const auto& w) {
        return w.message.rfind(kUnparseableDocument, 0) == 0;
    }));
}

const std::string kHeader = "<SEC-HEADER>0000000000-18-000001.hdr.sgml : 20180102\n"
                            "ACCESSION NUMBER:\t\t0000000000-18-000001\n"
                            "CONFORMED SUBMISSION TYPE:\t10-K\n"
                            "CENTRAL INDEX KEY:\t\t320193\n"
                            "FILED AS OF DATE:\t\t20180102\n"
                            "</SEC-HEADER>\n";

} // namespace

TEST_CASE("minimal fixture: header and two documents")
{
    const auto& expected = test::manifest()["unit"]["minimal_filing"];
    const auto filing = parse_filing(test::read_file(test::fixture("unit/minimal_filing.txt")));
    REQUIRE(filing.header);
    CHECK(filing.header->accession_number == expected["accession_number"].get<std::string>());
    CHECK(filing.header->cik == 1u);
    CHECK(filing.header->company_name == "MINIMAL FILER INC");
    CHECK(filing.header->form_type == "10-K");
    CHECK(filing.header->sic == "9999");
    CHECK(to_iso(*filing.header->date_filed) == "2018-01-02");
    CHECK(to_iso(*filing.header->period) == "2017-12-31");
    CHECK(filing.header->header_kind == HeaderKind::sec_header);
    REQUIRE(filing.documents.size() == 2);
    CHECK(filing.documents[0].content_type == "text/html");
    CHECK_FALSE(filing.documents[0].was_uuencoded);
    CHECK(filing.documents[1].was_uuencoded);
    CHECK(filing.documents[1].content_type == "application/pdf");
    for (std::size_t i = 0; i < 2; ++i) {
        CHECK(filing.documents[i].sequence == expected["documents"][i]["sequence"].get<std::uint32_t>());
        CHECK(filing.documents[i].sha1 == expected["documents"][i]["sha1"].get<std::string>());
        CHECK(filing.documents[i].body.size() == expected["documents"][i]["bytes"].get<std::size_t>());
    }
    CHECK(filing.warnings.empty());
}

TEST_CASE("not a filing")
{
    CHECK(code_of([] { parse_filing("hello world"); }) == ErrorCode::NotAFiling);
    CHECK(code_of([] { parse_filing(""); }) == ErrorCode::NotAFiling);
}

TEST_CASE("IMS-HEADER parses like SEC-HEADER")
{
    auto sec = test::read_file(test::fixture("unit/minimal_filing.txt"));
    auto ims = sec;
    for (const auto& [from, to] : {std::pair{"SEC-HEADER", "IMS-HEADER"}, {"SEC-DOCUMENT", "IMS-DOCUMENT"}}) {
        for (auto pos = ims.find(from); pos != std::string::npos; pos = ims.find(from, pos + 1)) {
            ims.replace(pos, std::string_view(from).size(), to);
        }
    }
    const auto a = parse_filing(sec);
    const auto b = parse_filing(ims);
    REQUIRE(b.header);
    CHECK(b.header->header_kind == HeaderKind::ims_header);
    auto header_b = *b.header;
    header_b.header_kind = HeaderKind::sec_header;
    CHECK(header_b == *a.header);
    CHECK(b.documents == a.documents);

    const auto& expected = test::manifest()["unit"]["ims_filing"];
    const auto old = parse_filing(test::read_file(test::fixture("unit/ims_filing.txt")));
    REQUIRE(old.header);
    CHECK(old.header->header_kind == HeaderKind::ims_header);
    CHECK(old.header->accession_number == expected["accession_number"].get<std::string>());
    REQUIRE(old.documents.size() == 1);
    CHECK(old.documents[0].sha1 == expected["sha1"].get<std::string>());
}

TEST_CASE("parse_header maps known fields")
{
    const auto header = parse_header(kHeader);
    CHECK(header.accession_number == "0000000000-18-000001");
    CHECK(header.cik == 320193u);
    CHECK(header.form_type == "10-K");
    CHECK(to_iso(*header.date_filed) == "2018-01-02");
    CHECK_FALSE(header.sic);
    CHECK_FALSE(header.period);
}

TEST_CASE("parse_header keeps unknown tags in order")
{
    auto text = kHeader;
    text.insert(text.find("</SEC-HEADER>"), "FOO: bar\n<ZED>qux\nFOO: again\n");
    const auto header = parse_header(text);
    const std::vector<std::pair<std::string, std::string>> expected = {{"FOO", "bar"}, {"ZED", "qux"}, {"FOO", "again"}};
    std::vector<std::pair<std::string, std::string>> tail(header.extra.end() - 3, header.extra.end());
    CHECK(tail == expected);
}

TEST_CASE("parse_header needs an accession number")
{
    CHECK(code_of([] {
              parse_header("<SEC-HEADER>\nCONFORMED SUBMISSION TYPE:\t10-K\n</SEC-HEADER>\n");
          }) == ErrorCode::MissingAccession);
    CHECK(code_of([] {
              parse_header("<SEC-HEADER>\nACCESSION NUMBER:\t123-45\n</SEC-HEADER>\n");
          }) == ErrorCode::MissingAccession);
}

TEST_CASE("SGML tag headers")
{
    const auto header = parse_header("<SEC-HEADER>x.hdr.sgml : 20180228\n<ACCESSION-NUMBER>0001467858-18-000012\n"
                                     "<TYPE>10-K\n<FILING-DATE>20180228\n<PERIOD>20171231\n<FILER>\n<COMPANY-DATA>\n"
                                     "<CONFORMED-NAME>ALLIANCE MOTORS CO\n<CIK>0001467858\n<ASSIGNED-SIC>3711\n"
                                     "</COMPANY-DATA>\n</FILER>\n</SEC-HEADER>\n");
    CHECK(header.accession_number == "0001467858-18-000012");
    CHECK(header.cik == 1467858u);
    CHECK(header.company_name == "ALLIANCE MOTORS CO");
    CHECK(header.sic == "3711");
    CHECK(to_iso(*header.period) == "2017-12-31");
}

TEST_CASE("SIC code taken from the bracketed classification")
{
    auto text = kHeader;
    text.insert(text.find("</SEC-HEADER>"), "STANDARD INDUSTRIAL CLASSIFICATION:\tELECTRONIC COMPUTERS [3571]\n");
    CHECK(parse_header(text).sic == "3571");
}

TEST_CASE("parse_document: HTML body")
{
    const auto doc = parse_document("<DOCUMENT>\n<TYPE>10-K\n<SEQUENCE>1\n<FILENAME>a.htm\n<TEXT>\n"
                                    "<html><body>x</body></html>\n</TEXT>\n</DOCUMENT>\n");
    CHECK(doc.doc_type == "10-K");
    CHECK(doc.sequence == 1);
    CHECK(doc.filename == "a.htm");
    CHECK(doc.content_type == "text/html");
    CHECK(doc.body == "<html><body>x</body></html>");
    CHECK(doc.sha1 == sha1_hex(doc.body));
}

TEST_CASE("parse_document: uuencoded PDF")
{
    std::string pdf = "%PDF-1.4\n";
    for (int i = 0; i < 500; ++i) {
        pdf.push_back(static_cast<char>((i * 31) & 0xFF));
    }
    const auto segment = "<DOCUMENT>\n<TYPE>PDF\n<SEQUENCE>2\n<FILENAME>a.pdf\n<TEXT>\n" + uuencode(pdf, "a.pdf") +
                         "</TEXT>\n</DOCUMENT>\n";
    const auto doc = parse_document(segment);
    CHECK(doc.was_uuencoded);
    CHECK(doc.content_type == "application/pdf");
    CHECK(doc.body == pdf);
    CHECK(doc.sha1 == sha1_hex(pdf));
}

TEST_CASE("parse_document: empty TEXT region")
{
    const auto doc = parse_document("<DOCUMENT>\n<TYPE>EX-1\n<SEQUENCE>3\n<TEXT>\n</TEXT>\n</DOCUMENT>\n");
    CHECK(doc.body.empty());
    CHECK(doc.sha1 == "da39a3ee5e6b4b0d3255bfef95601890afd80709");
}

TEST_CASE("missing SEQUENCE is assigned by position with a warning")
{
    const auto raw = kHeader + "<DOCUMENT>\n<TYPE>A\n<SEQUENCE>1\n<TEXT>\none\n</TEXT>\n</DOCUMENT>\n"
                               "<DOCUMENT>\n<TYPE>B\n<TEXT>\ntwo\n</TEXT>\n</DOCUMENT>\n";
    const auto filing = parse_filing(raw);
    REQUIRE(filing.documents.size() == 2);
    CHECK(filing.documents[1].sequence == 2);
    CHECK(std::any_of(filing.warnings.begin(), filing.warnings.end(),
                      [](const auto& w) { return w.message.find("missing SEQUENCE") != std::string::npos; }));
}

TEST_CASE("duplicate sequence numbers warn and keep both documents")
{
    const auto raw = kHeader + "<DOCUMENT>\n<SEQUENCE>1\n<TEXT>\none\n</TEXT>\n</DOCUMENT>\n"
                               "<DOCUMENT>\n<SEQUENCE>1\n<TEXT>\ntwo\n</TEXT>\n</DOCUMENT>\n";
    const auto filing = parse_filing(raw);
    REQUIRE(filing.documents.size() == 2);
    CHECK(filing.documents[0].body == "one");
    CHECK(filing.documents[1].body == "two");
    CHECK(std::any_of(filing.warnings.begin(), filing.warnings.end(),
                      [](const auto& w) { return w.message == "duplicate sequence number"; }));
}

TEST_CASE("documents without a header")
{
    const auto filing = parse_filing("<DOCUMENT>\n<SEQUENCE>1\n<TEXT>\nx\n</TEXT>\n</DOCUMENT>\n");
    CHECK_FALSE(filing.header);
    CHECK(filing.documents.size() == 1);
    CHECK(std::any_of(filing.warnings.begin(), filing.warnings.end(),
                      [](const auto& w) { return w.message == kHeaderMissing; }));
}

TEST_CASE("unclosed DOCUMENT runs to the next one")
{
    const auto raw = kHeader + "<DOCUMENT>\n<SEQUENCE>1\n<TEXT>\none\n</TEXT>\n"
                               "<DOCUMENT>\n<SEQUENCE>2\n<TEXT>\ntwo\n</TEXT>\n</DOCUMENT>\n";
    const auto filing = parse_filing(raw);
    REQUIRE(filing.documents.size() == 2);
    CHECK(filing.documents[0].body == "one");
    CHECK(filing.documents[1].body == "two");
    CHECK(std::any_of(filing.warnings.begin(), filing.warnings.end(),
                      [](const auto& w) { return w.message == "unclosed DOCUMENT tag"; }));
}

TEST_CASE("removal markers surface as warnings and stay in extra")
{
    auto text = kHeader;
    text.insert(text.find("</SEC-HEADER>"), "DELETION DATE:\t\t20180301\n");
    const auto filing = parse_filing(text + "<DOCUMENT>\n<SEQUENCE>1\n<TEXT>\nx\n</TEXT>\n</DOCUMENT>\n");
    REQUIRE(filing.header);
    CHECK(std::any_of(filing.header->extra.begin(), filing.header->extra.end(),
                      [](const auto& kv) { return kv.first == "DELETION DATE" && kv.second == "20180301"; }));
    CHECK(std::any_of(filing.warnings.begin(), filing.warnings.end(),
                      [](const auto& w) { return w.message.rfind("removal marker", 0) == 0; }));
}

TEST_CASE("detect_content_type precedence")
{
    CHECK(detect_content_type("%PDF-1.4 ...", std::string_view("a.txt")) == "application/pdf");
    CHECK(detect_content_type("<html><body>x</body></html>") == "text/html");
    CHECK(detect_content_type("plain words", std::string_view("doc.htm")) == "text/html");
    CHECK(detect_content_type("plain words") == "text/plain");
    CHECK(detect_content_type(std::string("PK\x03\x04rest", 8)) == "application/zip");
    CHECK(detect_content_type("GIF89a....") == "image/gif");
    CHECK(detect_content_type("\x89PNG\r\n\x1a\n") == "image/png");
    CHECK(detect_content_type("\xFF\xD8\xFF\xE0") == "image/jpeg");
    CHECK(detect_content_type("  <?xml version=\"1.0\"?><a/>") == "text/xml");
    CHECK(detect_content_type("\xEF\xBB\xBF<!DOCTYPE html><p>") == "text/html");
    CHECK(detect_content_type("<HTML>") == "text/html");
    CHECK(detect_content_type("hello", std::string_view("x.XML")) == "text/xml");
}

TEST_CASE("is_accession_number and accession_from_path")
{
    CHECK(is_accession_number("0000320193-18-000001"));
    CHECK_FALSE(is_accession_number("000320193-18-000001"));
    CHECK_FALSE(is_accession_number("0000320193-18-00000a"));
    CHECK(accession_from_path("edgar/data/320193/0000320193-18-000001.txt") == "0000320193-18-000001");
    CHECK_FALSE(accession_from_path("edgar/data/320193/readme.txt"));
}

TEST_CASE("every fixture filing parses to the manifest digests")
{
    const auto& m = test::manifest();
    std::map<std::string, std::vector<nlohmann::json>> docs_by_accession;
    for (const auto& d : m["documents"]) {
        docs_by_accession[d["accession_number"].get<std::string>()].push_back(d);
    }
    for (const auto& [accession, filing] : m["filings"].items()) {
        if (!filing["raw_stored"].get<bool>()) {
            continue;
        }
        CAPTURE(accession);
        const auto raw = test::read_file(test::fixture("mock_edgar/archives/" + filing["edgar_path"].get<std::string>()));
        const auto parsed = parse_filing(raw);
        CHECK(parsed == parse_filing(raw));
        if (!filing["is_processed"].get<bool>()) {
            CHECK_FALSE(parsed.header);
            continue;
        }
        REQUIRE(parsed.header);
        CHECK(parsed.header->accession_number == accession);
        CHECK(parsed.header->form_type == filing["form_type"].get<std::string>());
        const auto& expected = docs_by_accession[accession];
        REQUIRE(parsed.documents.size() == expected.size());
        for (std::size_t i = 0; i < expected.size(); ++i) {
            const auto& doc = parsed.documents[i];
            CHECK(doc.sequence == expected[i]["sequence"].get<std::uint32_t>());
            CHECK(doc.sha1 == expected[i]["sha1"].get<std::string>());
            CHECK(doc.body.size() == expected[i]["bytes"].get<std::size_t>());
            CHECK(doc.content_type == expected[i]["content_type"].get<std::string>());
            CHECK(doc.was_uuencoded == expected[i]["uuencoded"].get<bool>());
            CHECK(sha1_hex(doc.body) == doc.sha1);
        }
    }
}

TEST_CASE("segment accounting and no crash under mutation")
{
    std::vector<std::string> seeds;
    for (const auto& [accession, filing] : test::manifest()["filings"].items()) {
        if (filing["raw_stored"].get<bool>()) {
            seeds.push_back(test::read_file(test::fixture("mock_edgar/archives/" + filing["edgar_path"].get<std::string>())));
        }
    }
    std::mt19937_64 rng(99);
    const std::vector<std::string> tokens = {"<DOCUMENT>\n", "</DOCUMENT>\n", "<TEXT>\n", "</TEXT>\n", "<SEQUENCE>",
                                             "begin 644 x\n", "end\n", "M", "\n", "<SEC-HEADER>\n", ":"};
    for (int i = 0; i < 1500; ++i) {
        auto raw = seeds[static_cast<std::size_t>(i) % seeds.size()];
        for (int e = 0, n = 1 + static_cast<int>(rng() % 5); e < n; ++e) {
            const auto pos = rng() % raw.size();
            switch (rng() % 3) {
            case 0: raw.erase(pos, 1 + rng() % 64); break;
            case 1: raw.insert(pos, tokens[rng() % tokens.size()]); break;
            default: raw[pos] = static_cast<char>(rng() & 0xFF); break;
            }
            if (raw.empty()) {
                raw = "x";
            }
        }
        try {
            const auto parsed = parse_filing(raw);
            REQUIRE(count_lines_starting(raw, "<DOCUMENT>") == parsed.documents.size() + unparseable(parsed));
            for (const auto& doc : parsed.documents) {
                REQUIRE(doc.sha1 == sha1_hex(doc.body));
                REQUIRE(doc.sequence >= 1);
            }
        } catch (const Error& e) {
            REQUIRE(e.code() == ErrorCode::NotAFiling);
        }
    }
}

TEST_CASE("audit dump names the parts")
{
    const auto dump = to_audit_dump(parse_filing(test::read_file(test::fixture("unit/minimal_filing.txt"))));
    CHECK(dump.find("accession_number: 0000000001-18-000001") != std::string::npos);
    CHECK(dump.find("documents: 2") != std::string::npos);
    CHECK(dump.find("uuencoded=yes") != std::string::npos);
}
