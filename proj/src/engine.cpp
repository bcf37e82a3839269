#include "bsn/engine.hpp"

#include <sstream>

namespace bsn {

std::string_view to_string(MacAction a)
{
    switch (a) {
    case MacAction::Sleep: return "sleep";
    case MacAction::Transmit: return "transmit";
    case MacAction::Receive: return "receive";
    case MacAction::IdleListen: return "idle_listen";
    case MacAction::Contend: return "contend";
    case MacAction::Backoff: return "backoff";
    case MacAction::AccessFailure: return "access_failure";
    }
    return "?";
}

std::string_view to_string(EventKind k)
{
    switch (k) {
    case EventKind::SlotBoundary: return "slot";
    case EventKind::FrameBoundary: return "frame";
    case EventKind::PacketArrival: return "arrival";
    case EventKind::TransmissionEnd: return "tx_end";
    case EventKind::CcaSample: return "cca";
    case EventKind::WakeupSignal: return "wakeup";
    case EventKind::Beacon: return "beacon";
    case EventKind::Timer: return "timer";
    }
    return "?";
}

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::string_view name)
{
    // FNV-1a over the name, mixed with the run seed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : name) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(seed) ^ h);
}

Engine::Engine(std::uint64_t seed, std::uint64_t event_cap) : seed_(seed), event_cap_(event_cap) {}

EventHandle Engine::schedule(SimTime at, EntityId target, EventKind kind, std::function<void()> action)
{
    if (at < now_) {
        std::ostringstream os;
        os << "causality violation: " << to_string(kind) << " event for entity " << target
           << " scheduled at t=" << at << " but engine time is " << now_;
        throw CausalityError(os.str());
    }
    const std::uint64_t seq = next_seq_++;
    queue_.push(Key{at, seq});
    actions_.emplace(seq, Pending{target, kind, std::move(action)});
    return EventHandle{seq};
}

bool Engine::cancel(EventHandle h)
{
    if (!h.valid())
        return false;
    return actions_.erase(h.seq_) > 0;
}

std::uint64_t Engine::run(SimTime until)
{
    if (until < now_) {
        std::ostringstream os;
        os << "causality violation: run(until=" << until << ") but engine time is " << now_;
        throw CausalityError(os.str());
    }
    std::uint64_t count = 0;
    while (!queue_.empty() && queue_.top().at <= until) {
        const Key key = queue_.top();
        queue_.pop();
        auto it = actions_.find(key.seq);
        if (it == actions_.end())
            continue;  // tombstone
        Pending p = std::move(it->second);
        actions_.erase(it);
        now_ = key.at;
        if (++processed_ > event_cap_) {
            std::ostringstream os;
            os << "event cap of " << event_cap_ << " exceeded at t=" << now_ << " (last event "
               << to_string(p.kind) << " for entity " << p.target << ")";
            throw EventCapExceeded(os.str());
        }
        ++count;
        if (trace_)
            trace_(TraceRecord{key.at, key.seq, p.target, p.kind});
        p.action();
    }
    now_ = until;
    return count;
}

Rng Engine::stream(std::string_view name) const
{
    return Rng{stream_seed(seed_, name)};
}

}  // namespace bsn
