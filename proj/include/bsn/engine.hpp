#pragma once

#include "bsn/types.hpp"

#include <cstdint>
#include <functional>
#include <queue>
#include <random>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bsn {

enum class EventKind : std::uint8_t {
    SlotBoundary,
    FrameBoundary,
    PacketArrival,
    TransmissionEnd,
    CcaSample,
    WakeupSignal,
    Beacon,
    Timer,
};

std::string_view to_string(EventKind k);

/// Per-entity pseudo-random stream.
using Rng = std::mt19937_64;

/// Opaque reference to a scheduled event. Valid until the event fires or is cancelled.
class EventHandle {
public:
    EventHandle() = default;
    bool valid() const { return seq_ != kInvalid; }

private:
    friend class Engine;
    static constexpr std::uint64_t kInvalid = std::numeric_limits<std::uint64_t>::max();
    explicit EventHandle(std::uint64_t seq) : seq_(seq) {}
    std::uint64_t seq_ = kInvalid;
};

struct TraceRecord {
    SimTime at;
    std::uint64_t seq;
    EntityId target;
    EventKind kind;
};

class CausalityError : public Error {
public:
    using Error::Error;
};

class EventCapExceeded : public Error {
public:
    using Error::Error;
};

/// Discrete-event engine. Events fire in strictly ascending (time, insertion sequence) order.
/// Cancellation is lazy: the queue keeps a key for a cancelled event and skips it on pop.
/// Single-threaded; independent instances share nothing.
class Engine {
public:
    static constexpr std::uint64_t kDefaultEventCap = 50'000'000;

    explicit Engine(std::uint64_t seed, std::uint64_t event_cap = kDefaultEventCap);

    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    SimTime now() const { return now_; }
    std::uint64_t seed() const { return seed_; }

    /// Throws CausalityError if `at` is earlier than now().
    EventHandle schedule(SimTime at, EntityId target, EventKind kind, std::function<void()> action);
    EventHandle schedule_in(SimTime delay, EntityId target, EventKind kind, std::function<void()> action)
    {
        return schedule(now_ + delay, target, kind, std::move(action));
    }

    /// True iff the event was still pending. A cancelled event never fires.
    bool cancel(EventHandle h);

    /// Processes every event with time <= until, then advances the clock to `until`.
    /// Returns the number of events processed by this call.
    std::uint64_t run(SimTime until);

    std::size_t pending() const { return actions_.size(); }
    std::uint64_t processed() const { return processed_; }

    /// Independent stream derived from the engine seed and a stable name. Adding a stream
    /// never perturbs the draws of another.
    Rng stream(std::string_view name) const;

    void set_trace(std::function<void(const TraceRecord&)> sink) { trace_ = std::move(sink); }

private:
    struct Key {
        SimTime at;
        std::uint64_t seq;
        bool operator>(const Key& o) const { return at != o.at ? at > o.at : seq > o.seq; }
    };
    struct Pending {
        EntityId target;
        EventKind kind;
        std::function<void()> action;
    };

    std::uint64_t seed_;
    std::uint64_t event_cap_;
    SimTime now_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t processed_ = 0;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> queue_;
    std::unordered_map<std::uint64_t, Pending> actions_;
    std::function<void(const TraceRecord&)> trace_;
};

/// Stable 64-bit hash used to derive stream seeds.
std::uint64_t stream_seed(std::uint64_t seed, std::string_view name);

}  // namespace bsn
