#pragma once

#include "bsn/types.hpp"

#include <array>
#include <vector>

namespace bsn {

enum class RadioState : std::uint8_t { Transmit, Receive, CcaSense, IdleListen, Sleep, WakeupListen };

inline constexpr std::size_t kRadioStateCount = 6;

std::string_view to_string(RadioState s);

/// Power draw per radio state, in milliwatts.
struct PowerProfile {
    double transmit_mw = 36.0;
    double receive_mw = 40.0;
    double cca_mw = 40.0;
    double idle_listen_mw = 20.0;
    double wakeup_listen_mw = 0.1;
    double sleep_mw = 0.001;

    double power(RadioState s) const;
    /// Sleep < WakeupListen < every active state.
    void validate() const;
    bool operator==(const PowerProfile&) const = default;
};

class LedgerError : public Error {
public:
    using Error::Error;
};

/// Per-entity radio-state timeline. Every entity is in exactly one state at every instant;
/// closed intervals tile [0, now) without gaps.
class EnergyLedger {
public:
    EnergyLedger(std::size_t entity_count, PowerProfile power, RadioState initial = RadioState::Sleep);

    /// Closes the current interval of `entity` at t and opens `state`. Throws LedgerError
    /// if t precedes the entity's previous transition.
    void accrue_state(EntityId entity, RadioState state, SimTime t);

    /// Closes every open interval at t. No further transitions are accepted.
    void finalize(SimTime t);

    RadioState state(EntityId entity) const { return entities_.at(entity).state; }
    SimTime since(EntityId entity) const { return entities_.at(entity).since; }
    SimTime duration(EntityId entity, RadioState s) const;
    SimTime total_duration(EntityId entity) const;
    /// Millijoules accumulated over closed intervals.
    double energy_mj(EntityId entity) const;
    /// Fraction of closed time spent in Sleep or WakeupListen.
    double sleep_ratio(EntityId entity) const;
    std::size_t size() const { return entities_.size(); }
    const PowerProfile& power() const { return power_; }
    std::uint64_t transitions() const { return transitions_; }

private:
    struct Entity {
        RadioState state;
        SimTime since = 0;
        std::array<SimTime, kRadioStateCount> durations{};
    };
    PowerProfile power_;
    std::vector<Entity> entities_;
    bool finalized_ = false;
    std::uint64_t transitions_ = 0;
};

}  // namespace bsn
