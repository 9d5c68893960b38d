#include <doctest.h>

#include <random>

#include <edgar/error.hpp>

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

struct Served {
    mock::MockEdgarServer server{test::fixture("mock_edgar")};
    std::unique_ptr<EdgarClient> client;

    Served()
    {
        server.start();
        client = std::make_unique<EdgarClient>(
            test::fast_client_config(server.base_url(), server.metadata_base_url()), make_http_transport());
    }
};

const std::string kMaster = "edgar/full-index/2018/QTR1/master.idx";

HttpResponse ok(std::string body = "ok") { return {200, std::move(body), {}}; }

} // namespace

TEST_CASE("fetch returns fixture bytes verbatim")
{
    Served s;
    for (const auto& path : {kMaster, std::string("edgar/full-index/2018/QTR1/form.idx"),
                             std::string("edgar/data/320193/0000320193-18-000001.txt")}) {
        CAPTURE(path);
        CHECK(s.client->fetch(path) == test::read_file(test::fixture("mock_edgar/archives/" + path)));
    }
}

TEST_CASE("byte ranges")
{
    Served s;
    const auto whole = test::read_file(test::fixture("mock_edgar/archives/" + kMaster));
    CHECK(code_of([&] { s.client->fetch(kMaster, ByteRange{0, 0}); }) == ErrorCode::InvalidPath);
    CHECK(code_of([&] { s.client->fetch(kMaster, ByteRange{9, 3}); }) == ErrorCode::InvalidPath);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        const auto begin = rng() % whole.size();
        const auto end = begin + 1 + rng() % (whole.size() - begin);
        CHECK(s.client->fetch(kMaster, ByteRange{begin, end}) == whole.substr(begin, end - begin));
    }
    CHECK(s.client->fetch(kMaster, ByteRange{whole.size() - 4, whole.size() + 100}) == whole.substr(whole.size() - 4));
}

TEST_CASE("resource path validation")
{
    Served s;
    CHECK(code_of([&] { s.client->fetch(""); }) == ErrorCode::InvalidPath);
    CHECK(code_of([&] { s.client->fetch("/edgar/x"); }) == ErrorCode::InvalidPath);
    CHECK(code_of([&] { s.client->fetch("edgar/../../etc/passwd"); }) == ErrorCode::InvalidPath);
    CHECK(s.server.request_count() == 0);
}

TEST_CASE("missing resources are NotFound without retry")
{
    Served s;
    CHECK(code_of([&] { s.client->fetch("edgar/data/320193/0000320193-18-000011.txt"); }) == ErrorCode::NotFound);
    CHECK(s.server.request_count() == 1);
}

TEST_CASE("company metadata")
{
    Served s;
    CHECK(s.client->fetch_company_metadata(320193) ==
          test::read_file(test::fixture("mock_edgar/metadata/submissions/CIK0000320193.json")));
    CHECK(code_of([&] { s.client->fetch_company_metadata(0); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { s.client->fetch_company_metadata(1467858); }) == ErrorCode::NotFound);
}

TEST_CASE("rate-limit payload detection")
{
    Served s;
    CHECK(s.client->is_rate_limited_payload(test::read_file(test::fixture("unit/throttle.html"))));
    CHECK_FALSE(s.client->is_rate_limited_payload(""));
    CHECK_FALSE(s.client->is_rate_limited_payload(test::read_file(test::fixture("mock_edgar/archives/" + kMaster))));
}

TEST_CASE("throttle responses are retried")
{
    Served s;
    s.server.throttle_next(2);
    CHECK(s.client->fetch(kMaster) == test::read_file(test::fixture("mock_edgar/archives/" + kMaster)));
    CHECK(s.server.request_count() == 3);
}

TEST_CASE("persistent throttling ends in RateLimited after the retry budget")
{
    Served s;
    s.server.throttle_all(true);
    CHECK(code_of([&] { s.client->fetch(kMaster); }) == ErrorCode::RateLimited);
    CHECK(s.server.request_count() == static_cast<std::size_t>(s.client->config().max_retries + 1));
}

TEST_CASE("server errors and truncation are retried")
{
    Served s;
    s.server.fail_next(1, 503);
    s.server.truncate_next(1);
    CHECK(s.client->fetch(kMaster) == test::read_file(test::fixture("mock_edgar/archives/" + kMaster)));
    CHECK(s.server.request_count() == 3);
}

TEST_CASE("retry bound: exactly max_retries + 1 attempts")
{
    for (int retries : {0, 1, 3, 5}) {
        auto transport = std::make_shared<test::FakeTransport>([](const HttpRequest&) { return HttpResponse{500, "", {}}; });
        auto config = test::fast_client_config("http://archive.test/Archives", "http://meta.test");
        config.max_retries = retries;
        EdgarClient client(config, transport, std::make_shared<SimulatedClock>());
        CHECK(code_of([&] { client.fetch("a/b.txt"); }) == ErrorCode::Transport);
        CHECK(transport->request_count() == static_cast<std::size_t>(retries + 1));
        CHECK(client.attempts_made() == static_cast<std::uint64_t>(retries + 1));
    }
}

TEST_CASE("403 is AccessDenied without retry")
{
    auto transport = std::make_shared<test::FakeTransport>([](const HttpRequest&) { return HttpResponse{403, "", {}}; });
    EdgarClient client(test::fast_client_config("http://archive.test/Archives", "http://meta.test"), transport,
                       std::make_shared<SimulatedClock>());
    CHECK(code_of([&] { client.fetch("a/b.txt"); }) == ErrorCode::AccessDenied);
    CHECK(transport->request_count() == 1);
}

TEST_CASE("requests carry the configured User-Agent and the joined URL")
{
    auto transport = std::make_shared<test::FakeTransport>([](const HttpRequest&) { return ok(); });
    EdgarClient client(test::fast_client_config("http://archive.test/Archives/", "http://meta.test"), transport,
                       std::make_shared<SimulatedClock>());
    client.fetch("edgar/data/1/x.txt");
    client.fetch_company_metadata(42);
    const auto requests = transport->requests();
    REQUIRE(requests.size() == 2);
    CHECK(requests[0].url == "http://archive.test/Archives/edgar/data/1/x.txt");
    CHECK(requests[1].url == "http://meta.test/submissions/CIK0000000042.json");
    for (const auto& r : requests) {
        const auto ua = std::find_if(r.headers.begin(), r.headers.end(), [](const auto& h) { return h.first == "User-Agent"; });
        REQUIRE(ua != r.headers.end());
        CHECK(ua->second == "edgar-tests test@example.com");
    }
}

TEST_CASE("configuration validation")
{
    auto config = test::fast_client_config("http://a.test", "http://b.test");
    config.user_agent = "  ";
    CHECK(code_of([&] { config.validate(); }) == ErrorCode::InvalidConfig);
    config = test::fast_client_config("http://a.test", "http://b.test");
    config.max_requests_per_second = 0;
    CHECK(code_of([&] { config.validate(); }) == ErrorCode::InvalidConfig);
    config = test::fast_client_config("ftp://a.test", "http://b.test");
    CHECK(code_of([&] { config.validate(); }) == ErrorCode::InvalidConfig);
    config = test::fast_client_config("http://a.test", "http://b.test");
    config.index_path_template = "edgar/{year}/{type}.idx";
    CHECK(code_of([&] { config.validate(); }) == ErrorCode::InvalidConfig);
    auto transport = std::make_shared<test::FakeTransport>([](const HttpRequest&) { return ok(); });
    config = test::fast_client_config("http://a.test", "http://b.test");
    config.user_agent.clear();
    CHECK(code_of([&] { EdgarClient(config, transport); }) == ErrorCode::InvalidConfig);
}

TEST_CASE("index enumeration")
{
    auto config = test::fast_client_config("http://a.test", "http://b.test");
    config.first_index_year = 2016;
    config.last_index_year = 2018;
    const auto year = list_index_files(config, 2018, std::nullopt);
    CHECK(year.size() == 16);
    CHECK(year.front().path == "edgar/full-index/2018/QTR1/company.idx");
    CHECK(year.back().path == "edgar/full-index/2018/QTR4/xbrl.idx");
    const auto quarter = list_index_files(config, 2018, 2);
    CHECK(quarter.size() == 4);
    for (const auto& d : quarter) {
        CHECK(d.quarter == 2);
        CHECK(d.year == 2018);
        CHECK(d.path == index_path(config.index_path_template, 2018, 2, d.index_type));
    }
    CHECK(list_index_files(config, std::nullopt, std::nullopt).size() == 48);
    CHECK(code_of([&] { list_index_files(config, std::nullopt, 1); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { list_index_files(config, 2018, 5); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("rate limiter: no closed window of ceil(rate)/rate seconds holds more than ceil(rate) starts")
{
    for (double rate : {1.0, 2.5, 8.0, 10.0}) {
        CAPTURE(rate);
        auto clock = std::make_shared<SimulatedClock>();
        std::vector<Clock::duration> starts;
        auto transport = std::make_shared<test::FakeTransport>([&](const HttpRequest&) {
            starts.push_back(clock->now());
            return ok();
        });
        auto config = test::fast_client_config("http://a.test", "http://b.test");
        config.max_requests_per_second = rate;
        EdgarClient client(config, transport, clock);
        std::mt19937_64 rng(static_cast<std::uint64_t>(rate * 10));
        for (int i = 0; i < 60; ++i) {
            if (rng() % 3 == 0) {
                clock->advance(std::chrono::milliseconds(rng() % 400));
            }
            client.fetch("x.txt");
        }
        const auto limit = static_cast<std::size_t>(std::ceil(rate));
        const auto window = std::chrono::duration_cast<Clock::duration>(
            std::chrono::duration<double>(static_cast<double>(limit) / rate));
        for (auto s : starts) {
            const auto in_window =
                std::count_if(starts.begin(), starts.end(), [&](auto t) { return t >= s && t <= s + window; });
            REQUIRE(static_cast<std::size_t>(in_window) <= limit);
        }
        // Over the long run the achieved rate stays at or under the configured one.
        const auto span = std::chrono::duration<double>(starts.back() - starts.front()).count();
        CHECK(static_cast<double>(starts.size() - limit) <= rate * span + 1e-9);
    }
}
