#pragma once

#include "bsn/baselines.hpp"
#include "bsn/channel.hpp"
#include "bsn/contention.hpp"
#include "bsn/energy.hpp"
#include "bsn/ptdma.hpp"
#include "bsn/traffic.hpp"
#include "bsn/wakeup.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bsn {

enum class MacKind : std::uint8_t { Ptdma, Csma, CsmaPrio, Smac, Pbtdma, Beacon154 };

std::string_view to_string(MacKind m);
/// Throws ConfigError for an unknown name.
MacKind parse_mac(std::string_view name);

/// Reserved id of the hub node.
inline constexpr std::string_view kCoordinatorId = "coordinator";

struct NodeConfig {
    std::string id;
    Placement placement = Placement::OnBody;
    /// Surface distance to the coordinator.
    double distance_m = 0.5;
    /// Implant depth below the surface; 0 for on-body nodes.
    double depth_m = 0.0;
    /// Angular position around the coordinator, used for node-to-node distances.
    double bearing_deg = 0.0;
    std::optional<WakeupPattern> pattern;
    std::optional<std::uint32_t> slot;
    std::uint32_t wakeup_channel = 0;
    Priority priority = Priority::NonCritical;
    std::optional<Rate> rate;
    double tx_power_dbm = 0.0;
    bool gts = false;

    bool operator==(const NodeConfig&) const = default;
};

struct PatternUpdate {
    SimTime at;
    std::string node;
    WakeupPattern pattern;
    bool operator==(const PatternUpdate&) const = default;
};

struct PtdmaConfig {
    SimTime slot_duration = milliseconds(10);
    SimTime guard_time = milliseconds(1);
    /// Defaults to the node count.
    std::optional<std::uint32_t> slots_per_frame;
    std::vector<PatternUpdate> updates;
    bool operator==(const PtdmaConfig&) const = default;
};

struct PhyParams {
    double bitrate_bps = 250000.0;
    SimTime turnaround = 192;
    std::uint32_t ack_bits = 88;

    SimTime airtime(std::uint32_t bits) const;
    bool operator==(const PhyParams&) const = default;
};

struct WakeupConfig {
    WakeupMode mode = WakeupMode::FrequencyAddressed;
    SimTime signal_duration = milliseconds(1);
    std::uint32_t coordinator_channel = 0;
    /// Main-radio listen time charged to a node woken by a signal not meant for it.
    SimTime false_wake_cost = milliseconds(1);
    bool operator==(const WakeupConfig&) const = default;
};

struct EmergencySection {
    EmergencyConfig config;
    std::vector<std::string> nodes;
    bool operator==(const EmergencySection&) const = default;
};

struct TrafficConfig {
    std::uint32_t payload_bits = 1016;
    ArrivalMode arrivals = ArrivalMode::Pinned;
    std::uint32_t queue_capacity = 64;
    /// Default for nodes without their own rate.
    Rate rate{0.0, Rate::Unit::PerSecond};
    bool operator==(const TrafficConfig&) const = default;
};

struct OnDemandRequest {
    SimTime at;
    std::string node;
    SessionKind kind;
    /// NonContinuous: packet count. Continuous: absolute stop time in microseconds.
    std::uint64_t param;
    bool operator==(const OnDemandRequest&) const = default;
};

struct OnDemandConfig {
    /// Packet interval of a continuous stream; defaults to one TDMA frame.
    std::optional<SimTime> stream_interval;
    std::vector<OnDemandRequest> requests;
    bool operator==(const OnDemandConfig&) const = default;
};

struct Scenario {
    std::string name = "scenario";
    MacKind mac = MacKind::Ptdma;
    SimTime duration = 0;
    std::vector<std::uint64_t> seeds{1};
    std::uint64_t event_cap = 50'000'000;

    ChannelParams channel;
    PhyParams phy;
    PowerProfile power;
    PtdmaConfig ptdma;
    BackoffConfig csma;
    SuperframeConfig superframe;
    DutyCycleConfig smac;
    PreambleSlotConfig pbtdma;
    WakeupConfig wakeup;
    std::optional<EmergencySection> emergency;
    TrafficConfig traffic;
    OnDemandConfig ondemand;
    std::vector<NodeConfig> nodes;

    /// Index of a node id, or nullopt.
    std::optional<EntityId> find_node(std::string_view id) const;
    /// Wake-up table in slot order. Requires every node to carry a pattern.
    WakeupTable wakeup_table() const;
    TdmaParams tdma_params() const;

    bool operator==(const Scenario&) const = default;
};

/// Parse failure. `line` is 0 for semantic errors that are not tied to one line.
class ScenarioError : public ConfigError {
public:
    ScenarioError(std::size_t line, std::string section, const std::string& message);
    std::size_t line() const { return line_; }
    const std::string& section() const { return section_; }

private:
    std::size_t line_;
    std::string section_;
};

/// Parses the line-oriented scenario format and validates every section.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Semantic validation of a scenario for a particular MAC.
void validate_for(const Scenario& s, MacKind mac);

/// Writes every field explicitly; parse_scenario(to_text(s)) == s.
std::string to_text(const Scenario& s);

}  // namespace bsn
