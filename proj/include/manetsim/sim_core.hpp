#ifndef MANETSIM_SIM_CORE_HPP
#define MANETSIM_SIM_CORE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace manet {

// Simulation time in seconds.
using SimTime = double;

using EventId = std::uint64_t;

enum class EventKind {
    PacketDelivery,
    Timer,
    MobilityLegEnd,
    TrafficTick,
    PeriodicUpdate,
};

struct PastTimeError : std::runtime_error {
    explicit PastTimeError(const std::string& what) : std::runtime_error(what) {}
};

struct BadRangeError : std::runtime_error {
    explicit BadRangeError(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic discrete-event engine. Events fire in (fire_at, insertion)
// order: ties on fire_at run FIFO in scheduling order. The clock never moves
// backward.
class Engine {
  public:
    Engine() = default;
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    SimTime now() const { return clock_; }

    // Enqueues an action at fire_at. Throws PastTimeError if fire_at is
    // before the current clock. The returned id can cancel the event until
    // it fires.
    EventId schedule(SimTime fire_at, EventKind kind, std::function<void()> action);

    // True if the event was still pending and has been removed.
    bool cancel(EventId id);

    // Executes every pending event with fire_at <= t_end, then sets the
    // clock to t_end. Returns the number of events executed.
    std::size_t run_until(SimTime t_end);

    std::size_t pending_count() const { return actions_.size(); }

  private:
    struct QueueKey {
        SimTime fire_at;
        std::uint64_t seq;
        EventId id;
        bool operator>(const QueueKey& other) const {
            if (fire_at != other.fire_at) return fire_at > other.fire_at;
            return seq > other.seq;
        }
    };

    struct Pending {
        EventKind kind;
        std::function<void()> action;
    };

    SimTime clock_ = 0.0;
    std::uint64_t next_id_ = 1;
    std::uint64_t next_seq_ = 0;
    std::priority_queue<QueueKey, std::vector<QueueKey>, std::greater<QueueKey>> queue_;
    std::unordered_map<EventId, Pending> actions_;
};

// Seeded 64-bit PRNG; the splitmix64 state transition, so the draw sequence
// is reproducible from the seed alone:
//   state += 0x9E3779B97F4A7C15
//   z = state; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9
//   z = (z ^ z>>27) * 0x94D049BB133111EB; output z ^ z>>31
// Doubles come from the top 53 bits: (out >> 11) * 2^-53, uniform on [0,1).
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) : state_(seed), seed_(seed) {}

    std::uint64_t next_u64();

    // Uniform draw on [lo, hi); lo == hi returns lo. Consumes exactly one
    // generator step. Throws BadRangeError if lo > hi.
    double uniform(double lo, double hi);

    // Integer draw on [0, n); n must be positive. One generator step.
    int uniform_int(int n);

    std::uint64_t seed() const { return seed_; }

  private:
    std::uint64_t state_;
    std::uint64_t seed_;
};

// Sub-stream seed tags. Each stochastic concern of a run draws from its own
// derived stream (seed XOR tag) so e.g. changing the protocol does not
// perturb the mobility scenario.
namespace seed_tag {
inline constexpr std::uint64_t kScenario = 0x5343454E4152494FULL;  // "SCENARIO"
inline constexpr std::uint64_t kTraffic = 0x0054524146464943ULL;   // "TRAFFIC"
inline constexpr std::uint64_t kJitter = 0x004A49545445520AULL;    // "JITTER"
}  // namespace seed_tag

}  // namespace manet

#endif
