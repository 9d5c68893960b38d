#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace edgar {

enum class JobKind { download_index, process_filing, extract_text, update_companies, search };

std::string_view to_string(JobKind kind) noexcept;

/// (kind, subject) names a unit of work; subject is the natural key it
/// touches (index path, accession number, digest, query id).
struct JobSpec {
    JobKind kind = JobKind::download_index;
    std::string subject;
    int attempt = 0;

    friend bool operator==(const JobSpec&, const JobSpec&) = default;
};

enum class JobStatus { succeeded, skipped, failed };

/// Handlers return an outcome for anything they understood. A thrown
/// exception means "transient, try again".
struct JobOutcome {
    JobStatus status = JobStatus::succeeded;
    std::string detail;

    static JobOutcome ok(std::string detail = {}) { return {JobStatus::succeeded, std::move(detail)}; }
    static JobOutcome skip(std::string detail = {}) { return {JobStatus::skipped, std::move(detail)}; }
    static JobOutcome fail(std::string detail) { return {JobStatus::failed, std::move(detail)}; }
};

struct JobFailure {
    JobSpec job;
    std::string detail;
};

struct RunReport {
    std::string operation;
    std::uint64_t jobs_total = 0;
    std::uint64_t jobs_succeeded = 0;
    std::uint64_t jobs_failed = 0;
    std::uint64_t jobs_skipped = 0;
    std::uint64_t attempts = 0;
    bool aborted = false;
    std::chrono::milliseconds wall_time{0};
    std::vector<JobFailure> failures;   // sorted by (kind, subject)
    std::map<std::string, std::int64_t> counters;

    /// Stable machine-readable form (see README for the field list).
    std::string to_json() const;
    /// One-paragraph summary for humans.
    std::string to_text() const;
};

/// Queue boundary between the coordinator and the workers. The in-process
/// queue below is the only implementation shipped; a broker-backed queue
/// can slot in behind the same three calls.
class JobQueue {
public:
    virtual ~JobQueue() = default;
    virtual void push(JobSpec job) = 0;
    /// Blocks until a job is available or the queue is closed and drained.
    virtual std::optional<JobSpec> pop() = 0;
    virtual void close() = 0;
};

class InProcessQueue final : public JobQueue {
public:
    void push(JobSpec job) override;
    std::optional<JobSpec> pop() override;
    void close() override;

private:
    std::mutex mutex_;
    std::condition_variable ready_;
    std::deque<JobSpec> jobs_;
    bool closed_ = false;
};

struct ExecuteOptions {
    std::size_t worker_count = 1;
    /// Retries after the first attempt for jobs that throw.
    int retry_limit = 2;
    /// Stop handing out work after this many jobs have finished; used to
    /// simulate a crash mid-run.
    std::optional<std::size_t> stop_after;
};

using JobHandler = std::function<JobOutcome(const JobSpec&)>;

/// Runs every job at least once on `worker_count` threads. Handlers must be
/// idempotent: a job may run more than once and in any order.
RunReport execute(std::vector<JobSpec> jobs, const JobHandler& handler, const ExecuteOptions& options);

} // namespace edgar
