#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include <edgar/filing_parser.hpp>
#include <edgar/index_parser.hpp>
#include <edgar/text_extract.hpp>
#include <edgar/uucodec.hpp>

namespace {

std::string random_bytes(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::string out(n, '\0');
    for (auto& c : out) {
        c = static_cast<char>(rng() & 0xFF);
    }
    return out;
}

std::string master_index(std::size_t rows)
{
    std::string out = "Description:           Master Index of EDGAR Dissemination Feed\n"
                      "Last Data Received:    March 31, 2018\n\n"
                      "CIK|Company Name|Form Type|Date Filed|Filename\n"
                      "--------------------------------------------------------------------------------\n";
    for (std::size_t i = 0; i < rows; ++i) {
        const auto cik = std::to_string(1000 + i % 5000);
        out += cik + "|COMPANY " + cik + " INC|" + (i % 3 ? "8-K" : "10-K") + "|2018-02-" +
               std::to_string(10 + i % 18) + "|edgar/data/" + cik + "/0000" + cik + "-18-" + std::to_string(100000 + i) +
               ".txt\n";
    }
    return out;
}

std::string filing(std::size_t documents, std::size_t body_bytes)
{
    std::string out = "<SEC-DOCUMENT>0000320193-18-000001.txt : 20180102\n"
                      "<SEC-HEADER>0000320193-18-000001.hdr.sgml : 20180102\n"
                      "ACCESSION NUMBER:\t\t0000320193-18-000001\n"
                      "CONFORMED SUBMISSION TYPE:\t10-K\n"
                      "FILED AS OF DATE:\t\t20180102\n"
                      "FILER:\n\tCOMPANY DATA:\n\t\tCOMPANY CONFORMED NAME:\t\t\tBENCH CO\n"
                      "\t\tCENTRAL INDEX KEY:\t\t\t0000320193\n"
                      "</SEC-HEADER>\n";
    const std::string paragraph = "<p>The Company entered into an agreement with its lenders.</p>\n";
    for (std::size_t d = 1; d <= documents; ++d) {
        out += "<DOCUMENT>\n<TYPE>EX-" + std::to_string(d) + "\n<SEQUENCE>" + std::to_string(d) +
               "\n<FILENAME>d" + std::to_string(d) + ".htm\n<TEXT>\n<html><body>\n";
        while (out.size() < d * body_bytes) {
            out += paragraph;
        }
        out += "</body></html>\n</TEXT>\n</DOCUMENT>\n";
    }
    return out + "</SEC-DOCUMENT>\n";
}

void BM_ParseIndex(benchmark::State& state)
{
    const auto text = master_index(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(edgar::parse_index(text));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseIndex)->Arg(1000)->Arg(20000);

void BM_ParseFiling(benchmark::State& state)
{
    const auto text = filing(static_cast<std::size_t>(state.range(0)), 64 * 1024);
    for (auto _ : state) {
        benchmark::DoNotOptimize(edgar::parse_filing(text));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * text.size()));
}
BENCHMARK(BM_ParseFiling)->Arg(4)->Arg(32);

void BM_Uudecode(benchmark::State& state)
{
    const auto data = random_bytes(static_cast<std::size_t>(state.range(0)), 1);
    const auto encoded = edgar::uuencode(data, "bench.pdf");
    for (auto _ : state) {
        benchmark::DoNotOptimize(edgar::uudecode(encoded));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * data.size()));
}
BENCHMARK(BM_Uudecode)->Arg(64 * 1024)->Arg(4 * 1024 * 1024);

void BM_HtmlToText(benchmark::State& state)
{
    const auto html = filing(1, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(edgar::html_to_text(html));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * html.size()));
}
BENCHMARK(BM_HtmlToText)->Arg(64 * 1024)->Arg(1024 * 1024);

} // namespace
