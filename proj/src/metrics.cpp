#include "bsn/metrics.hpp"

#include "json.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

namespace bsn {

std::uint64_t ClassMetrics::dropped() const
{
    return std::accumulate(drops.begin(), drops.end(), std::uint64_t{0});
}

SimTime percentile(std::span<const SimTime> sorted, double q)
{
    if (sorted.empty())
        return 0;
    auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

namespace {

struct Accumulator {
    ClassMetrics m;
    std::vector<SimTime> latencies;
    double access_sum = 0.0;

    void add(const Packet& p)
    {
        ++m.generated;
        if (p.delivered_at) {
            ++m.delivered;
            latencies.push_back(*p.delivered_at - p.created_at);
            if (p.tx_start && p.head_at)
                access_sum += static_cast<double>(*p.tx_start - *p.head_at);
        } else if (p.dropped) {
            ++m.drops[static_cast<std::size_t>(*p.dropped)];
        } else {
            ++m.drops[static_cast<std::size_t>(DropReason::Unsent)];
        }
    }

    ClassMetrics finish()
    {
        std::sort(latencies.begin(), latencies.end());
        m.pdr = m.generated ? static_cast<double>(m.delivered) / static_cast<double>(m.generated) : 0.0;
        auto& l = m.latency;
        l.count = latencies.size();
        if (!latencies.empty()) {
            double sum = 0.0;
            for (auto v : latencies)
                sum += static_cast<double>(v);
            l.mean_us = sum / static_cast<double>(latencies.size());
            l.median_us = percentile(latencies, 0.5);
            l.p95_us = percentile(latencies, 0.95);
            l.max_us = latencies.back();
            m.access_latency_mean_us = access_sum / static_cast<double>(latencies.size());
        }
        return m;
    }
};

EntityMetrics entity_metrics(const EnergyLedger& ledger, EntityId id, std::string name)
{
    EntityMetrics e;
    e.id = std::move(name);
    e.energy_mj = ledger.energy_mj(id);
    e.sleep_ratio = ledger.sleep_ratio(id);
    for (std::size_t s = 0; s < kRadioStateCount; ++s)
        e.durations[s] = ledger.duration(id, static_cast<RadioState>(s));
    e.total = ledger.total_duration(id);
    return e;
}

}  // namespace

MetricsReport summarize(const EnergyLedger& ledger, std::span<const Packet> packets, const RunInfo& info)
{
    MetricsReport r;
    r.scenario = info.scenario;
    r.mac = info.mac;
    r.seed = info.seed;
    r.duration = info.duration;
    r.counters = info.counters;

    std::map<TrafficClass, Accumulator> acc;
    for (auto c : kAllClasses)
        acc[c];
    Accumulator all;
    for (const auto& p : packets) {
        acc[p.cls].add(p);
        all.add(p);
        if (p.cls == TrafficClass::Emergency) {
            if (p.delivered_at) {
                if (*p.delivered_at - p.created_at >= info.emergency_deadline)
                    ++r.deadline_misses;
            } else if (p.dropped || p.created_at + info.emergency_deadline <= info.duration) {
                ++r.deadline_misses;
            }
        }
    }
    for (auto& [c, a] : acc)
        r.per_class[c] = a.finish();
    r.overall = all.finish();

    const auto n = static_cast<EntityId>(ledger.size());
    for (EntityId i = 0; i + 1 < n; ++i) {
        r.nodes.push_back(entity_metrics(ledger, i, i < info.entity_names.size() ? info.entity_names[i] : std::to_string(i)));
        r.energy_mj_total += r.nodes.back().energy_mj;
    }
    if (n > 0) {
        r.coordinator = entity_metrics(ledger, n - 1, "coordinator");
        r.energy_mj_total += r.coordinator.energy_mj;
        r.coord_sleep_ratio = r.coordinator.sleep_ratio;
    }
    return r;
}

std::string format_double(double v)
{
    if (v == 0.0)
        return "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

namespace {

nlohmann::ordered_json class_json(const ClassMetrics& m)
{
    nlohmann::ordered_json j;
    j["generated"] = m.generated;
    j["delivered"] = m.delivered;
    nlohmann::ordered_json drops;
    for (std::size_t d = 0; d < kDropReasonCount; ++d)
        drops[std::string(to_string(static_cast<DropReason>(d)))] = m.drops[d];
    j["dropped"] = drops;
    j["pdr"] = m.pdr;
    j["latency_us"] = {{"count", m.latency.count},
                       {"mean", m.latency.mean_us},
                       {"median", m.latency.median_us},
                       {"p95", m.latency.p95_us},
                       {"max", m.latency.max_us}};
    j["access_latency_mean_us"] = m.access_latency_mean_us;
    return j;
}

nlohmann::ordered_json entity_json(const EntityMetrics& e)
{
    nlohmann::ordered_json j;
    j["id"] = e.id;
    j["energy_mj"] = e.energy_mj;
    j["sleep_ratio"] = e.sleep_ratio;
    nlohmann::ordered_json states;
    for (std::size_t s = 0; s < kRadioStateCount; ++s)
        states[std::string(to_string(static_cast<RadioState>(s)))] = e.durations[s];
    j["state_us"] = states;
    return j;
}

}  // namespace

std::string to_json(const MetricsReport& r, int indent)
{
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["mac"] = r.mac;
    j["seed"] = r.seed;
    j["duration_us"] = r.duration;
    j["overall"] = class_json(r.overall);
    nlohmann::ordered_json classes;
    for (const auto& [c, m] : r.per_class)
        classes[std::string(to_string(c))] = class_json(m);
    j["classes"] = classes;
    j["coordinator"] = entity_json(r.coordinator);
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& n : r.nodes)
        nodes.push_back(entity_json(n));
    j["nodes"] = nodes;
    j["coord_sleep_ratio"] = r.coord_sleep_ratio;
    j["energy_mj_total"] = r.energy_mj_total;
    j["deadline_misses"] = r.deadline_misses;
    j["counters"] = {{"false_wakeups", r.counters.false_wakeups},
                     {"wakeup_signals", r.counters.wakeup_signals},
                     {"emergencies", r.counters.emergencies},
                     {"collisions", r.counters.collisions},
                     {"data_overlaps", r.counters.data_overlaps},
                     {"gts_denied", r.counters.gts_denied},
                     {"gts_revoked", r.counters.gts_revoked},
                     {"ondemand_rejected", r.counters.ondemand_rejected},
                     {"events", r.counters.events}};
    return j.dump(indent);
}

const std::string& csv_header()
{
    static const std::string h =
        "scenario,mac,seed,class,generated,delivered,drop_overflow,drop_access,drop_collision,drop_link,pdr,"
        "lat_mean_us,lat_p95_us,lat_max_us,energy_mj_total,coord_sleep_ratio,false_wakeups,deadline_misses";
    return h;
}

std::vector<std::string> csv_rows(const MetricsReport& r)
{
    std::vector<std::string> rows;
    auto row = [&](std::string_view cls, const ClassMetrics& m) {
        std::string s;
        s += r.scenario + ',' + r.mac + ',' + std::to_string(r.seed) + ',' + std::string(cls) + ',';
        s += std::to_string(m.generated) + ',' + std::to_string(m.delivered) + ',';
        s += std::to_string(m.drop(DropReason::QueueOverflow)) + ',';
        s += std::to_string(m.drop(DropReason::AccessFailure)) + ',';
        s += std::to_string(m.drop(DropReason::Collision)) + ',';
        s += std::to_string(m.drop(DropReason::LinkBudget)) + ',';
        s += format_double(m.pdr) + ',';
        s += format_double(m.latency.mean_us) + ',' + std::to_string(m.latency.p95_us) + ','
             + std::to_string(m.latency.max_us) + ',';
        s += format_double(r.energy_mj_total) + ',' + format_double(r.coord_sleep_ratio) + ',';
        s += std::to_string(r.counters.false_wakeups) + ',' + std::to_string(r.deadline_misses);
        rows.push_back(std::move(s));
    };
    for (const auto& [c, m] : r.per_class)
        row(to_string(c), m);
    row("all", r.overall);
    return rows;
}

}  // namespace bsn
