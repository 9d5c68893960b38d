#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <mutex>

#include "edgar/clock.hpp"

namespace edgar {

/// Process-wide request limiter shared by every worker.
///
/// Keeps a log of recent request start times and admits a request only when
/// fewer than `capacity` starts fall inside the trailing window, where
/// capacity = ceil(rate) and window = capacity / rate seconds. Any one-second
/// interval (open or closed) therefore holds at most ceil(rate) starts.
class RateLimiter {
public:
    RateLimiter(double requests_per_second, std::shared_ptr<Clock> clock);

    /// Blocks (through the clock) until a request may start, then records it.
    void acquire();
    bool try_acquire();

    std::size_t capacity() const noexcept { return capacity_; }
    Clock::duration window() const noexcept { return window_; }

private:
    void prune(Clock::duration now);

    std::shared_ptr<Clock> clock_;
    std::size_t capacity_;
    Clock::duration window_;
    std::mutex mutex_;
    std::deque<Clock::duration> starts_;
};

} // namespace edgar
