#include "manetsim/sim_core.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace manet {

EventId Engine::schedule(SimTime fire_at, EventKind kind, std::function<void()> action) {
    if (fire_at < clock_) {
        throw PastTimeError("schedule at t=" + std::to_string(fire_at) +
                            " before clock t=" + std::to_string(clock_));
    }
    EventId id = next_id_++;
    queue_.push(QueueKey{fire_at, next_seq_++, id});
    actions_.emplace(id, Pending{kind, std::move(action)});
    return id;
}

bool Engine::cancel(EventId id) {
    return actions_.erase(id) > 0;
}

std::size_t Engine::run_until(SimTime t_end) {
    std::size_t executed = 0;
    while (!queue_.empty() && queue_.top().fire_at <= t_end) {
        QueueKey key = queue_.top();
        queue_.pop();
        auto it = actions_.find(key.id);
        if (it == actions_.end()) continue;  // cancelled
        std::function<void()> action = std::move(it->second.action);
        actions_.erase(it);
        clock_ = key.fire_at;
        action();
        ++executed;
    }
    if (t_end > clock_) clock_ = t_end;
    return executed;
}

std::uint64_t RandomStream::next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double RandomStream::uniform(double lo, double hi) {
    if (lo > hi) {
        throw BadRangeError("uniform(" + std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    if (lo == hi) return lo;
    double v = lo + u * (hi - lo);
    // Rounding in lo + u*(hi-lo) can land exactly on hi; keep the interval
    // half-open.
    if (v >= hi) v = std::nextafter(hi, lo);
    return v;
}

int RandomStream::uniform_int(int n) {
    return static_cast<int>(uniform(0.0, static_cast<double>(n)));
}

}  // namespace manet
