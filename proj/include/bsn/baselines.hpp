#pragma once

#include "bsn/types.hpp"

namespace bsn {

/// Globally synchronized fixed duty cycle (S-MAC style). Each cycle is a listen period
/// followed by a sleep period, phase-aligned at t = 0.
struct DutyCycleConfig {
    SimTime listen_duration = milliseconds(115);
    SimTime sleep_duration = milliseconds(885);

    SimTime cycle() const { return listen_duration + sleep_duration; }
    double duty_cycle() const { return static_cast<double>(listen_duration) / static_cast<double>(cycle()); }
    void validate() const;
    bool operator==(const DutyCycleConfig&) const = default;
};

bool smac_listening(const DutyCycleConfig& cfg, SimTime t);
/// Start of the listen period at or after t.
SimTime smac_next_listen(const DutyCycleConfig& cfg, SimTime t);
/// End of the current listen period; only meaningful while listening.
SimTime smac_listen_end(const DutyCycleConfig& cfg, SimTime t);

/// Listen with data -> Contend; listen without -> IdleListen; sleep -> Sleep.
MacAction smac_step(SimTime t, const DutyCycleConfig& cfg, std::size_t queued);

/// Preamble-based TDMA: slots round-robin over node indices; a short preamble at every slot
/// start names the owner.
struct PreambleSlotConfig {
    SimTime slot_duration = milliseconds(50);
    SimTime preamble_duration = milliseconds(5);

    void validate() const;
    bool operator==(const PreambleSlotConfig&) const = default;
};

std::uint64_t pbtdma_slot_index(const PreambleSlotConfig& cfg, SimTime t);
EntityId pbtdma_owner(const PreambleSlotConfig& cfg, SimTime t, std::size_t node_count);

/// Everyone receives the preamble; the owner then transmits (or idles with an empty queue)
/// for the rest of the slot while everyone else sleeps.
MacAction pbtdma_step(EntityId node, SimTime t, const PreambleSlotConfig& cfg, std::size_t node_count,
                      std::size_t queued);

}  // namespace bsn
