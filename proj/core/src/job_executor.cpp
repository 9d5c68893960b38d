#include "edgar/job_executor.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <tuple>

#include <nlohmann/json.hpp>

#include "edgar/error.hpp"

namespace edgar {

std::string_view to_string(JobKind kind) noexcept
{
    switch (kind) {
    case JobKind::download_index: return "download_index";
    case JobKind::process_filing: return "process_filing";
    case JobKind::extract_text: return "extract_text";
    case JobKind::update_companies: return "update_companies";
    case JobKind::search: return "search";
    }
    return "unknown";
}

std::string RunReport::to_json() const
{
    nlohmann::ordered_json json;
    json["operation"] = operation;
    json["jobs_total"] = jobs_total;
    json["jobs_succeeded"] = jobs_succeeded;
    json["jobs_failed"] = jobs_failed;
    json["jobs_skipped"] = jobs_skipped;
    json["attempts"] = attempts;
    json["aborted"] = aborted;
    json["wall_time_ms"] = wall_time.count();
    auto failure_list = nlohmann::ordered_json::array();
    for (const auto& f : failures) {
        failure_list.push_back({{"kind", to_string(f.job.kind)},
                                {"subject", f.job.subject},
                                {"attempt", f.job.attempt},
                                {"detail", f.detail}});
    }
    json["failures"] = std::move(failure_list);
    json["counters"] = nlohmann::ordered_json::object();
    for (const auto& [name, value] : counters) {
        json["counters"][name] = value;
    }
    return json.dump(2);
}

std::string RunReport::to_text() const
{
    std::string out = operation + ": " + std::to_string(jobs_total) + " jobs, " + std::to_string(jobs_succeeded) +
                      " succeeded, " + std::to_string(jobs_skipped) + " skipped, " + std::to_string(jobs_failed) +
                      " failed (" + std::to_string(attempts) + " attempts, " + std::to_string(wall_time.count()) +
                      " ms)";
    if (aborted) {
        out += " [aborted]";
    }
    out += '\n';
    for (const auto& [name, value] : counters) {
        out += "  " + name + " = " + std::to_string(value) + '\n';
    }
    for (const auto& f : failures) {
        out += "  failed " + std::string(to_string(f.job.kind)) + " " + f.job.subject + ": " + f.detail + '\n';
    }
    return out;
}

void InProcessQueue::push(JobSpec job)
{
    {
        std::lock_guard lock(mutex_);
        if (closed_) {
            return;
        }
        jobs_.push_back(std::move(job));
    }
    ready_.notify_one();
}

std::optional<JobSpec> InProcessQueue::pop()
{
    std::unique_lock lock(mutex_);
    ready_.wait(lock, [&] { return closed_ || !jobs_.empty(); });
    if (closed_) {
        return std::nullopt;
    }
    auto job = std::move(jobs_.front());
    jobs_.pop_front();
    return job;
}

void InProcessQueue::close()
{
    {
        std::lock_guard lock(mutex_);
        closed_ = true;
        jobs_.clear();
    }
    ready_.notify_all();
}

RunReport execute(std::vector<JobSpec> jobs, const JobHandler& handler, const ExecuteOptions& options)
{
    if (options.worker_count == 0) {
        throw Error(ErrorCode::InvalidArgument, "worker_count must be at least 1");
    }
    if (options.retry_limit < 0) {
        throw Error(ErrorCode::InvalidArgument, "retry_limit must not be negative");
    }
    const auto started = std::chrono::steady_clock::now();
    RunReport report;

    InProcessQueue queue;
    std::mutex report_mutex;
    std::size_t outstanding = jobs.size();
    std::size_t finished = 0;

    if (jobs.empty()) {
        queue.close();
    }
    for (auto& job : jobs) {
        queue.push(std::move(job));
    }

    const auto settle = [&](const JobSpec& job, JobStatus status, const std::string& detail) {
        std::lock_guard lock(report_mutex);
        ++report.jobs_total;
        switch (status) {
        case JobStatus::succeeded: ++report.jobs_succeeded; break;
        case JobStatus::skipped: ++report.jobs_skipped; break;
        case JobStatus::failed:
            ++report.jobs_failed;
            report.failures.push_back({job, detail});
            break;
        }
        ++finished;
        --outstanding;
        const bool stop = options.stop_after && finished >= *options.stop_after && outstanding > 0;
        if (stop) {
            report.aborted = true;
        }
        if (outstanding == 0 || stop) {
            queue.close();
        }
    };

    const auto worker = [&] {
        while (auto job = queue.pop()) {
            {
                std::lock_guard lock(report_mutex);
                ++report.attempts;
            }
            JobOutcome outcome;
            std::string error;
            bool threw = false;
            try {
                outcome = handler(*job);
            } catch (const std::exception& e) {
                threw = true;
                error = e.what();
            } catch (...) {
                threw = true;
                error = "unknown exception";
            }
            if (!threw) {
                settle(*job, outcome.status, outcome.detail);
            } else if (job->attempt < options.retry_limit) {
                auto retry = *job;
                ++retry.attempt;
                queue.push(std::move(retry));
            } else {
                settle(*job, JobStatus::failed, error);
            }
        }
    };

    const auto threads = std::min(options.worker_count, std::max<std::size_t>(jobs.size(), 1));
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t i = 0; i < threads; ++i) {
        pool.emplace_back(worker);
    }
    for (auto& t : pool) {
        t.join();
    }

    std::sort(report.failures.begin(), report.failures.end(), [](const JobFailure& a, const JobFailure& b) {
        return std::tie(a.job.kind, a.job.subject) < std::tie(b.job.kind, b.job.subject);
    });
    report.wall_time =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    return report;
}

} // namespace edgar
