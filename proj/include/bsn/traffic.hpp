#pragma once

#include "bsn/engine.hpp"
#include "bsn/ptdma.hpp"
#include "bsn/types.hpp"
#include "bsn/wakeup.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace bsn {

enum class TrafficClass : std::uint8_t { Normal, Emergency, OnDemandContinuous, OnDemandNonContinuous };

inline constexpr std::array<TrafficClass, 4> kAllClasses = {TrafficClass::Normal, TrafficClass::Emergency,
                                                            TrafficClass::OnDemandContinuous,
                                                            TrafficClass::OnDemandNonContinuous};

std::string_view to_string(TrafficClass c);

enum class PacketOrigin : std::uint8_t { PeriodicRead, ThresholdEvent, CoordinatorRequest };

struct PacketDescriptor {
    PacketOrigin origin;
    std::optional<SessionKind> request_kind;  // required for CoordinatorRequest
};

class ClassificationError : public Error {
public:
    using Error::Error;
};

/// Periodic read -> Normal, threshold event -> Emergency, coordinator request -> on-demand
/// by request kind.
TrafficClass classify(const PacketDescriptor& meta);

enum class DropReason : std::uint8_t { QueueOverflow, AccessFailure, Collision, LinkBudget, Unsent };

std::string_view to_string(DropReason r);

using PacketId = std::uint64_t;

struct Packet {
    PacketId id = 0;
    EntityId source = 0;
    EntityId destination = 0;
    TrafficClass cls = TrafficClass::Normal;
    std::uint32_t size_bits = 0;
    SimTime created_at = 0;
    std::optional<SimTime> delivered_at;
    /// When the packet reached the head of its queue.
    std::optional<SimTime> head_at;
    /// Start of the transmission that delivered it.
    std::optional<SimTime> tx_start;
    std::uint32_t attempts = 0;
    std::optional<DropReason> dropped;
};

/// Arrival rate: packets per active frame of the node's wake-up pattern, or per second.
struct Rate {
    enum class Unit : std::uint8_t { PerActiveFrame, PerSecond };
    double value = 0.0;
    Unit unit = Unit::PerSecond;

    /// Parses "2/frame", "5/s", "30/min", "1/hour", "3/day", "2/week".
    static Rate parse(std::string_view text);
    std::string to_string() const;
    bool operator==(const Rate&) const = default;
};

enum class ArrivalMode : std::uint8_t { Pinned, Free };

/// Frame grid of the pattern TDMA, needed to pin arrivals to active frames.
struct FrameGrid {
    SimTime frame_duration;
    /// Offset of the node's own slot inside a frame.
    SimTime window_offset;
};

/// Normal-traffic arrival times in [0, horizon), sorted.
///
/// Pinned + per-frame: each active frame receives floor(r) packets plus one more with
/// probability frac(r), placed uniformly between the frame start and the node's window.
/// Pinned + per-second: Poisson arrivals moved forward to the next point where the node's
/// window is still ahead in an active frame. Free: Poisson arrivals at the equivalent mean rate.
std::vector<SimTime> generate_normal(const Rate& rate, ArrivalMode mode, const WakeupPattern* pattern,
                                     const std::optional<FrameGrid>& grid, SimTime horizon, Rng& rng);

struct Reading {
    SimTime at;
    double value;
};

/// Bounded Gaussian random walk sampled every cfg.sample_period, starting at cfg.start;
/// the first sample is taken at t = sample_period.
std::vector<Reading> generate_emergency(const EmergencyConfig& cfg, SimTime horizon, Rng& rng);

/// Validates a link data rate against the 10 kb/s .. 10 Mb/s envelope.
void validate_data_rate(double bits_per_second);

}  // namespace bsn
