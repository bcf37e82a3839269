#pragma once

#include "bsn/energy.hpp"
#include "bsn/traffic.hpp"
#include "bsn/types.hpp"

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace bsn {

inline constexpr std::size_t kDropReasonCount = 5;

struct LatencyStats {
    std::uint64_t count = 0;
    double mean_us = 0.0;
    SimTime median_us = 0;
    SimTime p95_us = 0;
    SimTime max_us = 0;
};

struct ClassMetrics {
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::array<std::uint64_t, kDropReasonCount> drops{};
    double pdr = 0.0;
    /// created -> delivered, delivered packets only.
    LatencyStats latency;
    /// head of queue -> start of the delivering transmission, delivered packets only.
    double access_latency_mean_us = 0.0;

    std::uint64_t dropped() const;
    std::uint64_t drop(DropReason r) const { return drops[static_cast<std::size_t>(r)]; }
};

struct EntityMetrics {
    std::string id;
    double energy_mj = 0.0;
    double sleep_ratio = 0.0;
    std::array<SimTime, kRadioStateCount> durations{};
    SimTime total = 0;
};

/// Counters gathered by the simulation outside the packet records.
struct RunCounters {
    std::uint64_t false_wakeups = 0;
    std::uint64_t wakeup_signals = 0;
    std::uint64_t collisions = 0;
    std::uint64_t data_overlaps = 0;
    std::uint64_t events = 0;
    std::uint64_t gts_denied = 0;
    std::uint64_t gts_revoked = 0;
    std::uint64_t ondemand_rejected = 0;
    std::uint64_t emergencies = 0;
};

struct RunInfo {
    std::string scenario;
    std::string mac;
    std::uint64_t seed = 0;
    SimTime duration = 0;
    SimTime emergency_deadline = seconds(1);
    /// Names of entities in id order; the coordinator is last.
    std::vector<std::string> entity_names;
    RunCounters counters;
};

struct MetricsReport {
    std::string scenario;
    std::string mac;
    std::uint64_t seed = 0;
    SimTime duration = 0;
    std::map<TrafficClass, ClassMetrics> per_class;
    ClassMetrics overall;
    std::vector<EntityMetrics> nodes;
    EntityMetrics coordinator;
    double coord_sleep_ratio = 0.0;
    double energy_mj_total = 0.0;
    std::uint64_t deadline_misses = 0;
    RunCounters counters;

    const ClassMetrics& of(TrafficClass c) const { return per_class.at(c); }
};

/// Nearest-rank percentile of a sorted sample; q in (0, 1].
SimTime percentile(std::span<const SimTime> sorted, double q);

/// Builds the run report. Undelivered packets only appear in drop counts. An emergency
/// counts as a deadline miss when delivered late or dropped, except when it was still
/// queued at the end of the run with its deadline not yet elapsed.
MetricsReport summarize(const EnergyLedger& ledger, std::span<const Packet> packets, const RunInfo& info);

std::string to_json(const MetricsReport& r, int indent = 2);

/// Fixed CSV column order shared by run and compare output.
const std::string& csv_header();
/// One row per traffic class plus an "all" row.
std::vector<std::string> csv_rows(const MetricsReport& r);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace bsn
