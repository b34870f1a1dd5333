#include "hallucheck/netverify.hpp"

#include <thread>

namespace hallucheck {

std::chrono::milliseconds SystemClock::now() const
{
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now().time_since_epoch());
}

void SystemClock::sleep_for(std::chrono::milliseconds d)
{
    std::this_thread::sleep_for(d);
}

RateLimiter::RateLimiter(Clock& clock, std::chrono::milliseconds interval) : clock_(clock), interval_(interval)
{
    lanes_.try_emplace(Service::OpenAlex);
    lanes_.try_emplace(Service::Dblp);
}

RateLimiter::Slot RateLimiter::acquire(Service s)
{
    Lane& lane = lanes_.at(s);
    std::unique_lock lock(lane.in_flight);
    if (lane.last_start) {
        auto ready = *lane.last_start + interval_;
        for (auto now = clock_.now(); now < ready; now = clock_.now()) {
            clock_.sleep_for(ready - now);
        }
    }
    lane.last_start = clock_.now();
    return Slot(std::move(lock));
}

} // namespace hallucheck
