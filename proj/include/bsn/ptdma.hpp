#pragma once

#include "bsn/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bsn {

/// Per-frame wake-up bits for one node over a hyperperiod: bit f = 1 means the node is
/// active in TDMA frame f, 0 means it sleeps through that frame.
class WakeupPattern {
public:
    /// Throws ConfigError if `bits` is empty.
    explicit WakeupPattern(std::vector<bool> bits);

    /// Parses a bit string such as "011".
    static WakeupPattern parse(std::string_view text);
    static WakeupPattern zeros(std::size_t length) { return WakeupPattern(std::vector<bool>(length, false)); }
    static WakeupPattern ones(std::size_t length) { return WakeupPattern(std::vector<bool>(length, true)); }

    std::size_t length() const { return bits_.size(); }
    bool active(std::size_t frame) const { return bits_.at(frame); }
    std::size_t active_count() const;
    bool all_zero() const { return active_count() == 0; }
    const std::vector<bool>& bits() const { return bits_; }
    std::string to_string() const;

    /// Bitwise OR. Throws ConfigError on length mismatch.
    WakeupPattern operator|(const WakeupPattern& o) const;
    bool operator==(const WakeupPattern&) const = default;

private:
    std::vector<bool> bits_;
};

/// The coordinator-maintained pattern table. Slots are handed out in registration order.
class WakeupTable {
public:
    struct Entry {
        WakeupPattern pattern;
        std::uint32_t slot;
    };

    WakeupTable() = default;

    /// Registers a node at the next free slot. All patterns must share one length.
    void add(EntityId node, WakeupPattern pattern);

    /// Returns a copy with `node`'s pattern replaced and the version bumped, even when the
    /// pattern is unchanged.
    WakeupTable update_pattern(EntityId node, const WakeupPattern& pattern) const;

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    std::size_t pattern_length() const { return length_; }
    std::uint64_t version() const { return version_; }
    bool contains(EntityId node) const { return entries_.count(node) != 0; }
    const Entry& at(EntityId node) const;
    const std::map<EntityId, Entry>& entries() const { return entries_; }

private:
    std::map<EntityId, Entry> entries_;
    std::size_t length_ = 0;
    std::uint64_t version_ = 0;
};

/// Bitwise OR over every node pattern. Throws ConfigError for an empty table.
WakeupPattern derive_coordinator_pattern(const WakeupTable& table);

struct TdmaParams {
    SimTime slot_duration = milliseconds(10);
    SimTime guard_time = milliseconds(1);
    std::uint32_t slots_per_frame = 1;

    SimTime frame_duration() const { return slot_duration * slots_per_frame; }
    void validate() const;
    bool operator==(const TdmaParams&) const = default;
};

/// Transmit window [start, end) relative to the start of a hyperperiod.
struct TdmaWindow {
    EntityId node;
    std::uint32_t frame;
    std::uint32_t slot;
    SimTime start;
    SimTime end;
};

class TdmaSchedule {
public:
    std::map<EntityId, std::vector<TdmaWindow>> windows;
    std::vector<bool> coordinator_active_frames;
    SimTime frame_duration = 0;
    SimTime slot_duration = 0;
    std::uint32_t slots_per_frame = 0;
    std::uint32_t length = 0;

    SimTime hyperperiod() const { return frame_duration * length; }
    std::uint32_t frame_at(SimTime t) const { return static_cast<std::uint32_t>((t % hyperperiod()) / frame_duration); }
    bool coordinator_active_at(SimTime t) const { return coordinator_active_frames[frame_at(t)]; }

    /// The window of `node` containing absolute time t, if any.
    std::optional<TdmaWindow> window_at(EntityId node, SimTime t) const;
    std::size_t window_count() const;
};

/// Capacity violation: more nodes than slots in a frame.
class CapacityError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Expands the table into per-node windows over one hyperperiod. A node owning slot s
/// transmits in every frame f whose pattern bit is 1, during
/// [f*F + s*slot, f*F + (s+1)*slot - guard).
TdmaSchedule build_schedule(const WakeupTable& table, const TdmaParams& params);

/// Node-side decision: Transmit while inside an own window with data queued, Sleep otherwise.
MacAction step(EntityId node, SimTime t, const TdmaSchedule& schedule, std::size_t queued);

/// Coordinator-side decision: Receive for the whole of every active frame, Sleep otherwise.
MacAction coordinator_step(SimTime t, const TdmaSchedule& schedule);

}  // namespace bsn
