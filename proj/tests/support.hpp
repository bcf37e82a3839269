#pragma once

#include "bsn/simulation.hpp"

#include <string>

namespace bsn::test {

inline std::string scenario_path(const std::string& name)
{
    return std::string(BSN_SCENARIO_DIR) + "/" + name;
}

inline NodeConfig onbody(std::string id, double distance_m, double bearing_deg = 0.0)
{
    NodeConfig n;
    n.id = std::move(id);
    n.placement = Placement::OnBody;
    n.distance_m = distance_m;
    n.bearing_deg = bearing_deg;
    return n;
}

inline NodeConfig inbody(std::string id, double distance_m, double depth_m, double bearing_deg = 0.0)
{
    NodeConfig n = onbody(std::move(id), distance_m, bearing_deg);
    n.placement = Placement::InBody;
    n.depth_m = depth_m;
    return n;
}

/// Pattern-TDMA scenario over the given patterns, one node per pattern in slot order.
inline Scenario pattern_scenario(const std::vector<std::string>& patterns, Rate rate, SimTime duration)
{
    Scenario s;
    s.name = "patterns";
    s.mac = MacKind::Ptdma;
    s.duration = duration;
    s.traffic.rate = rate;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
        auto n = onbody("n" + std::to_string(i), 0.3 + 0.05 * static_cast<double>(i), 30.0 * static_cast<double>(i));
        n.pattern = WakeupPattern::parse(patterns[i]);
        n.slot = static_cast<std::uint32_t>(i);
        s.nodes.push_back(n);
    }
    return s;
}

}  // namespace bsn::test
