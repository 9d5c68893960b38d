#pragma once

#include <chrono>
#include <memory>
#include <mutex>

namespace edgar {

/// Monotonic time source. The rate limiter and retry backoff sleep through
/// this interface so tests can substitute simulated time.
class Clock {
public:
    using duration = std::chrono::nanoseconds;

    virtual ~Clock() = default;
    virtual duration now() = 0;
    virtual void sleep_until(duration deadline) = 0;

    void sleep_for(duration d) { sleep_until(now() + d); }
};

class SystemClock final : public Clock {
public:
    duration now() override;
    void sleep_until(duration deadline) override;
};

/// Time only moves when someone sleeps or advances it; sleeping returns
/// immediately after moving the clock forward.
class SimulatedClock final : public Clock {
public:
    explicit SimulatedClock(duration start = duration::zero()) : now_(start) {}

    duration now() override;
    void sleep_until(duration deadline) override;
    void advance(duration d);

private:
    std::mutex mutex_;
    duration now_;
};

std::shared_ptr<Clock> system_clock();

} // namespace edgar
