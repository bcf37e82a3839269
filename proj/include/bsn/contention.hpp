#pragma once

#include "bsn/channel.hpp"
#include "bsn/engine.hpp"
#include "bsn/types.hpp"

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace bsn {

/// Back-off priority class. Emergency traffic always contends as Critical.
enum class Priority : std::uint8_t { Critical, NonCritical };

std::string_view to_string(Priority p);

struct BackoffConfig {
    std::uint32_t w0_critical = 8;
    std::uint32_t w0_noncritical = 32;
    /// Single window used by the unprioritized MACs (plain CSMA/CA, S-MAC, 802.15.4 CAP).
    std::uint32_t w0_standard = 8;
    std::uint32_t max_doublings = 5;
    std::uint32_t max_attempts = 5;
    SimTime backoff_slot = 320;
    SimTime cca_duration = 128;
    std::uint32_t max_retries = 3;
    SimTime ack_timeout = milliseconds(1);

    /// Rejects w0_critical > w0_noncritical among other invariants.
    void validate() const;
    bool operator==(const BackoffConfig&) const = default;
};

std::uint32_t initial_window(Priority cls, const BackoffConfig& cfg);

/// One node's channel-access state for the packet at the head of its queue.
///
/// The window starts at w0 and doubles after every Busy assessment, saturating after
/// `max_doublings`. After `max_attempts` Busy assessments access fails.
class CsmaState {
public:
    CsmaState(std::uint32_t w0, const BackoffConfig& cfg);

    std::uint32_t window() const { return window_; }
    std::uint32_t attempts() const { return attempts_; }
    std::uint32_t pending_backoff() const { return pending_; }
    bool failed() const { return attempts_ >= max_attempts_; }

    /// Draws a fresh back-off uniformly from [0, window - 1].
    std::uint32_t draw(Rng& rng);

    /// Resets to the initial window for a new packet or retransmission.
    void reset();

private:
    friend MacAction csma_step(CsmaState& state, const CcaResult& cca, Rng& rng);

    std::uint32_t w0_;
    std::uint32_t window_;
    std::uint32_t max_doublings_;
    std::uint32_t max_attempts_;
    std::uint32_t attempts_ = 0;
    std::uint32_t pending_ = 0;
};

/// Reacts to one clear-channel assessment. Idle -> Transmit. Busy -> doubles the window
/// (capped), counts the attempt and redraws (Backoff), or AccessFailure once attempts are
/// exhausted. After Backoff, `pending_backoff()` holds the new draw.
MacAction csma_step(CsmaState& state, const CcaResult& cca, Rng& rng);

struct SuperframeConfig {
    SimTime beacon_interval = milliseconds(100);
    SimTime beacon_duration = 600;
    SimTime cap_duration = milliseconds(60);
    std::uint32_t gts_slot_count = 2;
    SimTime gts_slot_duration = milliseconds(10);
    std::uint32_t gts_expiry_frames = 2;

    void validate() const;
    bool operator==(const SuperframeConfig&) const = default;
};

struct Interval {
    SimTime start;
    SimTime end;
    bool contains(SimTime t) const { return t >= start && t < end; }
    bool operator==(const Interval&) const = default;
};

/// Absolute layout of one beacon interval. The beacon opens the CAP; GTS slots follow it;
/// the remainder is inactive.
struct SuperframeLayout {
    std::uint64_t index;
    Interval beacon;
    Interval cap;
    std::vector<Interval> gts;
    Interval inactive;
};

SuperframeLayout superframe_layout(const SuperframeConfig& cfg, std::uint64_t index);

enum class SuperframePhase : std::uint8_t { Beacon, Cap, Gts, Inactive };

struct SuperframePosition {
    std::uint64_t index;
    SuperframePhase phase;
    std::uint32_t gts_slot;  // valid when phase == Gts
};

SuperframePosition superframe_position(const SuperframeConfig& cfg, SimTime t);

/// Guaranteed-time-slot bookkeeping, evaluated once per beacon.
///
/// At each beacon the superframe that just ended is audited first: an owner that did not
/// use its slot accrues one idle superframe, an owner that did is reset to zero. An owner
/// reaching `gts_expiry_frames` idle superframes loses the slot at this beacon. Then the
/// beacon's requests are served first-come-first-served into free slots.
class GtsManager {
public:
    explicit GtsManager(const SuperframeConfig& cfg);

    struct BeaconResult {
        std::vector<EntityId> granted;
        std::vector<EntityId> denied;
        std::vector<EntityId> revoked;
    };

    BeaconResult on_beacon(std::span<const EntityId> requests, const std::set<EntityId>& used_last_superframe);

    std::optional<std::uint32_t> slot_of(EntityId node) const;
    const std::vector<std::optional<EntityId>>& allocation() const { return owners_; }
    std::uint64_t denied_total() const { return denied_total_; }
    std::uint64_t revoked_total() const { return revoked_total_; }

private:
    std::uint32_t expiry_;
    std::vector<std::optional<EntityId>> owners_;
    std::vector<std::uint32_t> idle_;
    bool first_beacon_ = true;
    std::uint64_t denied_total_ = 0;
    std::uint64_t revoked_total_ = 0;
};

/// Per-beacon input for gts_manage.
struct GtsBeaconInput {
    std::vector<EntityId> requests;
    std::set<EntityId> used_last_superframe;
};

struct GtsTraceResult {
    /// Allocation after the final beacon, slot -> owner.
    std::map<std::uint32_t, EntityId> allocation;
    /// (beacon index, node) for every revocation.
    std::vector<std::pair<std::size_t, EntityId>> revocations;
    std::uint64_t denied = 0;
};

/// Replays a beacon-by-beacon request/usage history through a GtsManager.
GtsTraceResult gts_manage(std::span<const GtsBeaconInput> history, const SuperframeConfig& cfg);

}  // namespace bsn
