#include <doctest.h>

#include <atomic>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include <edgar/error.hpp>
#include <edgar/job_executor.hpp>

using namespace edgar;

namespace {

std::vector<JobSpec> make_jobs(std::size_t n, JobKind kind = JobKind::process_filing)
{
    std::vector<JobSpec> jobs;
    for (std::size_t i = 0; i < n; ++i) {
        jobs.push_back({kind, "job-" + std::to_string(1000 + i), 0});
    }
    return jobs;
}

} // namespace

TEST_CASE("every job runs on a pool of workers")
{
    std::mutex mutex;
    std::multiset<std::string> seen;
    const auto report = execute(
        make_jobs(100),
        [&](const JobSpec& job) {
            std::lock_guard lock(mutex);
            seen.insert(job.subject);
            return JobOutcome::ok();
        },
        {8, 2, std::nullopt});
    CHECK(report.jobs_total == 100);
    CHECK(report.jobs_succeeded == 100);
    CHECK(report.attempts == 100);
    CHECK_FALSE(report.aborted);
    CHECK(seen.size() == 100);
    for (const auto& s : seen) {
        CHECK(seen.count(s) == 1);
    }
}

TEST_CASE("thrown exceptions are retried up to the limit")
{
    std::atomic<int> calls{0};
    const auto report = execute(
        make_jobs(1),
        [&](const JobSpec&) -> JobOutcome {
            ++calls;
            throw std::runtime_error("transient");
        },
        {4, 2, std::nullopt});
    CHECK(calls.load() == 3);
    CHECK(report.attempts == 3);
    CHECK(report.jobs_failed == 1);
    REQUIRE(report.failures.size() == 1);
    CHECK(report.failures[0].detail == "transient");
    CHECK(report.failures[0].job.attempt == 2);
}

TEST_CASE("a retried job that later succeeds counts once")
{
    std::mutex mutex;
    std::map<std::string, int> attempts;
    const auto report = execute(
        make_jobs(20),
        [&](const JobSpec& job) {
            std::lock_guard lock(mutex);
            if (++attempts[job.subject] < 2) {
                throw Error(ErrorCode::Transport, "flaky");
            }
            return JobOutcome::ok();
        },
        {3, 1, std::nullopt});
    CHECK(report.jobs_succeeded == 20);
    CHECK(report.jobs_failed == 0);
    CHECK(report.attempts == 40);
}

TEST_CASE("returned failures are not retried")
{
    std::atomic<int> calls{0};
    const auto report = execute(
        make_jobs(5),
        [&](const JobSpec&) {
            ++calls;
            return JobOutcome::fail("permanent");
        },
        {2, 5, std::nullopt});
    CHECK(calls.load() == 5);
    CHECK(report.jobs_failed == 5);
}

TEST_CASE("totals add up and failures are sorted")
{
    std::mt19937_64 rng(8);
    for (int round = 0; round < 20; ++round) {
        std::vector<JobSpec> jobs;
        const auto n = rng() % 60;
        for (std::size_t i = 0; i < n; ++i) {
            jobs.push_back({static_cast<JobKind>(rng() % 5), "s" + std::to_string(rng() % 1000), 0});
        }
        std::mutex mutex;
        std::map<std::string, int> plan;
        const auto report = execute(
            jobs,
            [&](const JobSpec& job) {
                const auto h = std::hash<std::string>{}(job.subject) % 4;
                if (h == 0) {
                    return JobOutcome::fail("no");
                }
                if (h == 1) {
                    return JobOutcome::skip("done");
                }
                if (h == 2) {
                    throw std::runtime_error("always");
                }
                return JobOutcome::ok();
            },
            {1 + rng() % 8, static_cast<int>(rng() % 3), std::nullopt});
        CHECK(report.jobs_total == n);
        CHECK(report.jobs_total == report.jobs_succeeded + report.jobs_failed + report.jobs_skipped);
        CHECK(report.failures.size() == report.jobs_failed);
        CHECK(std::is_sorted(report.failures.begin(), report.failures.end(), [](const auto& a, const auto& b) {
            return std::tie(a.job.kind, a.job.subject) < std::tie(b.job.kind, b.job.subject);
        }));
    }
}

TEST_CASE("stop_after simulates a crash")
{
    std::atomic<int> calls{0};
    const auto report = execute(
        make_jobs(50),
        [&](const JobSpec&) {
            ++calls;
            return JobOutcome::ok();
        },
        {1, 0, 10});
    CHECK(report.aborted);
    CHECK(report.jobs_total == 10);
    CHECK(calls.load() == 10);

    const auto exact = execute(make_jobs(10), [](const JobSpec&) { return JobOutcome::ok(); }, {1, 0, 10});
    CHECK_FALSE(exact.aborted);
}

TEST_CASE("empty job lists and bad options")
{
    const auto report = execute({}, [](const JobSpec&) { return JobOutcome::ok(); }, {4, 2, std::nullopt});
    CHECK(report.jobs_total == 0);
    CHECK_THROWS_AS(execute(make_jobs(1), [](const JobSpec&) { return JobOutcome::ok(); }, {0, 2, std::nullopt}), Error);
    CHECK_THROWS_AS(execute(make_jobs(1), [](const JobSpec&) { return JobOutcome::ok(); }, {1, -1, std::nullopt}),
                    Error);
}

TEST_CASE("report serialisation")
{
    auto report = execute(
        make_jobs(3),
        [](const JobSpec& job) { return job.subject == "job-1001" ? JobOutcome::fail("bad") : JobOutcome::ok(); },
        {2, 0, std::nullopt});
    report.operation = "process_all_filing_index";
    report.counters["widgets"] = 7;
    const auto json = nlohmann::json::parse(report.to_json());
    for (const auto* key : {"operation", "jobs_total", "jobs_succeeded", "jobs_failed", "jobs_skipped", "attempts",
                            "aborted", "wall_time_ms", "failures", "counters"}) {
        CAPTURE(key);
        CHECK(json.contains(key));
    }
    CHECK(json["jobs_failed"] == 1);
    CHECK(json["failures"][0]["subject"] == "job-1001");
    CHECK(json["failures"][0]["kind"] == "process_filing");
    CHECK(json["counters"]["widgets"] == 7);
    const auto text = report.to_text();
    CHECK(text.rfind("process_all_filing_index: 3 jobs, 2 succeeded, 0 skipped, 1 failed", 0) == 0);
    CHECK(text.find("failed process_filing job-1001: bad") != std::string::npos);
}
