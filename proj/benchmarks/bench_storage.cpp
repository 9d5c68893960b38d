#include <benchmark/benchmark.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>

#include <edgar/digest.hpp>
#include <edgar/object_store.hpp>

namespace {

std::filesystem::path scratch_dir()
{
    std::string pattern = (std::filesystem::temp_directory_path() / "edgar-bench-XXXXXX").string();
    if (!mkdtemp(pattern.data())) {
        std::abort();
    }
    return pattern;
}

std::string text_like(std::size_t n)
{
    const std::string words = "the company agreement shall lender notes annual report fiscal year ";
    std::string out;
    out.reserve(n);
    while (out.size() < n) {
        out += words;
    }
    out.resize(n);
    return out;
}

void BM_PutGet(benchmark::State& state)
{
    const auto dir = scratch_dir();
    edgar::ObjectStore store(edgar::make_filesystem_backend(dir));
    const auto body = text_like(static_cast<std::size_t>(state.range(0)));
    const bool compress = state.range(1) != 0;
    std::uint64_t i = 0;
    for (auto _ : state) {
        auto data = body + std::to_string(i++);
        const auto key = edgar::key_for_document(edgar::sha1_hex(data));
        store.put(key, data, compress);
        benchmark::DoNotOptimize(store.get(key));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * body.size()));
    std::filesystem::remove_all(dir);
}
BENCHMARK(BM_PutGet)->Args({64 * 1024, 1})->Args({64 * 1024, 0})->Args({1024 * 1024, 1});

void BM_RangeGetCompressed(benchmark::State& state)
{
    const auto dir = scratch_dir();
    edgar::ObjectStore store(edgar::make_filesystem_backend(dir));
    const auto body = text_like(1024 * 1024);
    store.put("bench/object", body, true);
    std::mt19937_64 rng(3);
    for (auto _ : state) {
        const auto a = rng() % (body.size() - 4096);
        benchmark::DoNotOptimize(store.get("bench/object", edgar::ByteRange{a, a + 4096}));
    }
    std::filesystem::remove_all(dir);
}
BENCHMARK(BM_RangeGetCompressed);

void BM_Sha1(benchmark::State& state)
{
    const auto body = text_like(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(edgar::sha1_hex(body));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * body.size()));
}
BENCHMARK(BM_Sha1)->Arg(1024 * 1024);

} // namespace
