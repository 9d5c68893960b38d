#include "edgar/clock.hpp"

#include <thread>

namespace edgar {

Clock::duration SystemClock::now()
{
    return std::chrono::duration_cast<duration>(std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_until(duration deadline)
{
    const auto remaining = deadline - now();
    if (remaining > duration::zero()) {
        std::this_thread::sleep_for(remaining);
    }
}

Clock::duration SimulatedClock::now()
{
    std::lock_guard lock(mutex_);
    return now_;
}

void SimulatedClock::sleep_until(duration deadline)
{
    std::lock_guard lock(mutex_);
    if (deadline > now_) {
        now_ = deadline;
    }
}

void SimulatedClock::advance(duration d)
{
    std::lock_guard lock(mutex_);
    now_ += d;
}

std::shared_ptr<Clock> system_clock()
{
    static auto clock = std::make_shared<SystemClock>();
    return clock;
}

} // namespace edgar
