#include "edgar/rate_limiter.hpp"

#include <cmath>

#include "edgar/error.hpp"

namespace edgar {

RateLimiter::RateLimiter(double requests_per_second, std::shared_ptr<Clock> clock) : clock_(std::move(clock))
{
    if (!(requests_per_second > 0.0) || !std::isfinite(requests_per_second)) {
        throw Error(ErrorCode::InvalidConfig, "max_requests_per_second must be > 0");
    }
    capacity_ = static_cast<std::size_t>(std::ceil(requests_per_second));
    window_ = std::chrono::duration_cast<Clock::duration>(
        std::chrono::duration<double>(static_cast<double>(capacity_) / requests_per_second));
}

void RateLimiter::prune(Clock::duration now)
{
    // A start at time s still counts at now == s + window; it drops out only
    // strictly after that, which keeps closed one-second windows in bounds.
    while (!starts_.empty() && now - starts_.front() > window_) {
        starts_.pop_front();
    }
}

bool RateLimiter::try_acquire()
{
    std::lock_guard lock(mutex_);
    const auto now = clock_->now();
    prune(now);
    if (starts_.size() < capacity_) {
        starts_.push_back(now);
        return true;
    }
    return false;
}

void RateLimiter::acquire()
{
    for (;;) {
        Clock::duration wake{};
        {
            std::lock_guard lock(mutex_);
            const auto now = clock_->now();
            prune(now);
            if (starts_.size() < capacity_) {
                starts_.push_back(now);
                return;
            }
            wake = starts_.front() + window_ + Clock::duration(1);
        }
        clock_->sleep_until(wake);
    }
}

} // namespace edgar
