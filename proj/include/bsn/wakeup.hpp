#pragma once

#include "bsn/types.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace bsn {

enum class WakeupMode : std::uint8_t { Broadcast, FrequencyAddressed };

std::string_view to_string(WakeupMode m);

enum class WakeupPurpose : std::uint8_t {
    Emergency,
    OnDemandContinuous,
    OnDemandNonContinuous,
    Grant,
    Hold,
};

struct WakeupSignal {
    EntityId origin;
    WakeupMode mode;
    std::uint32_t channel;  // used when mode == FrequencyAddressed
    WakeupPurpose purpose;
    std::uint32_t count;    // packets requested, OnDemandNonContinuous only
    SimTime duration;

    void validate() const;
};

/// A wake-up receiver tuned to one channel.
struct WakeupReceiver {
    EntityId node;
    std::uint32_t channel;
    bool in_range = true;
};

struct WakeupDelivery {
    std::vector<EntityId> woken;
    std::uint32_t false_wakeups = 0;
    bool delivered_to_nobody = false;
};

/// Broadcast wakes every in-range receiver; frequency-addressed wakes exactly the in-range
/// receivers tuned to the signal's channel. Every woken receiver not in `intended` counts
/// as a false wake-up. The sender never wakes itself.
WakeupDelivery deliver_wakeup(const WakeupSignal& signal, std::span<const WakeupReceiver> population,
                              std::span<const EntityId> intended);

struct EmergencyConfig {
    double threshold = 4.0;
    SimTime deadline = seconds(1);
    SimTime sample_period = milliseconds(100);
    double start = 0.0;
    double drift = 0.0;
    double step_sigma = 1.0;
    double floor = -10.0;
    double ceiling = 10.0;

    void validate() const;
    bool operator==(const EmergencyConfig&) const = default;
};

struct EmergencyEvent {
    EntityId node;
    SimTime at;
    double reading;
};

/// Threshold trigger with hysteresis: a reading strictly above the threshold raises an
/// emergency unless one is already unresolved for this node.
class EmergencyDetector {
public:
    std::optional<EmergencyEvent> observe(EntityId node, double reading, const EmergencyConfig& cfg, SimTime t);
    void resolve() { pending_ = false; }
    bool pending() const { return pending_; }

private:
    bool pending_ = false;
};

/// Stateless form of the trigger: no hysteresis, just the strict-threshold test.
std::optional<EmergencyEvent> emergency_trigger(EntityId node, double reading, const EmergencyConfig& cfg,
                                                SimTime t);

enum class SessionKind : std::uint8_t { Continuous, NonContinuous };
enum class SessionState : std::uint8_t { Requested, Streaming, Done };

std::string_view to_string(SessionKind k);

/// One coordinator-initiated on-demand exchange with a node.
class OnDemandSession {
public:
    OnDemandSession(EntityId target, SessionKind kind, std::uint32_t count);

    EntityId target() const { return target_; }
    SessionKind kind() const { return kind_; }
    std::uint32_t count() const { return count_; }
    std::uint32_t delivered() const { return delivered_; }
    SessionState state() const { return state_; }
    bool active() const { return state_ != SessionState::Done; }

    void on_woken();
    /// Counts one unique delivery; returns true when this closed a non-continuous session.
    bool on_delivered();
    /// Ends a continuous session.
    void stop();

private:
    EntityId target_;
    SessionKind kind_;
    std::uint32_t count_;
    std::uint32_t delivered_ = 0;
    SessionState state_ = SessionState::Requested;
};

class SessionRejected : public Error {
public:
    using Error::Error;
};

/// Tracks at most one active session per node.
class OnDemandManager {
public:
    explicit OnDemandManager(std::size_t node_count) : node_count_(node_count) {}

    /// Opens a session and returns the wake-up signal the coordinator must send. Throws
    /// SessionRejected for an unknown node or while a session to that node is active.
    WakeupSignal request(EntityId coordinator, EntityId target, SessionKind kind, std::uint32_t count,
                         WakeupMode mode, std::uint32_t target_channel, SimTime signal_duration);

    OnDemandSession* find(EntityId target);
    std::uint64_t rejected() const { return rejected_; }

private:
    std::size_t node_count_;
    std::map<EntityId, OnDemandSession> sessions_;
    std::uint64_t rejected_ = 0;
};

}  // namespace bsn
