#pragma once

#include "bsn/channel.hpp"
#include "bsn/engine.hpp"
#include "bsn/metrics.hpp"
#include "bsn/scenario.hpp"

#include <functional>
#include <vector>

namespace bsn {

enum class TxKind : std::uint8_t { Data, Ack, Beacon, Preamble };

std::string_view to_string(TxKind k);

struct TxLogEntry {
    EntityId tx;
    TxKind kind;
    SimTime start;
    SimTime end;
    TrafficClass cls;  // meaningful for Data only
};

struct CcaObservation {
    SimTime at;
    EntityId listener;
    CcaResult result;
    /// Transmitters on the air at the sample instant, excluding the listener.
    std::vector<EntityId> active;
};

struct RunOptions {
    std::function<void(const TraceRecord&)> trace;
    std::function<void(const CcaObservation&)> on_cca;
    bool keep_tx_log = false;
};

struct RunResult {
    MetricsReport report;
    std::vector<Packet> packets;
    std::vector<TxLogEntry> tx_log;
    /// Coordinator schedule versions applied at hyperperiod boundaries (ptdma only):
    /// (time applied, table version).
    std::vector<std::pair<SimTime, std::uint64_t>> table_versions;
};

/// Builds the engine, channel, selected MAC, traffic sources and ledger, runs to the
/// scenario duration and summarizes. EventCapExceeded propagates.
RunResult simulate(const Scenario& scenario, std::uint64_t seed, const RunOptions& options = {});

inline MetricsReport run_scenario(const Scenario& scenario, std::uint64_t seed)
{
    return simulate(scenario, seed).report;
}

struct MacSummary {
    std::string mac;
    std::size_t runs = 0;
    double pdr_mean = 0.0;
    double pdr_std = 0.0;
    double lat_mean_us_mean = 0.0;
    double lat_mean_us_std = 0.0;
    double energy_mj_mean = 0.0;
    double energy_mj_std = 0.0;
};

struct Comparison {
    /// In (mac, seed) order.
    std::vector<MetricsReport> runs;
    std::vector<MacSummary> summary;
};

class SweepError : public Error {
public:
    using Error::Error;
};

/// Runs every (mac, seed) pair, possibly on several threads; output order is always the
/// (mac, seed) order. A failing run aborts with a SweepError naming it.
Comparison compare(const Scenario& scenario, const std::vector<MacKind>& macs, const std::vector<std::uint64_t>& seeds,
                   unsigned jobs = 1);

/// CSV rows for every run, a blank line, then a "# summary" block with per-MAC mean and
/// sample standard deviation of the overall PDR, mean latency and total energy.
std::string comparison_csv(const Comparison& c);

}  // namespace bsn
