#include "bsn/wakeup.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bsn {

std::string_view to_string(WakeupMode m)
{
    return m == WakeupMode::Broadcast ? "broadcast" : "addressed";
}

std::string_view to_string(SessionKind k)
{
    return k == SessionKind::Continuous ? "continuous" : "noncontinuous";
}

void WakeupSignal::validate() const
{
    if (duration == 0)
        throw ConfigError("wake-up signal duration must be > 0");
    if (purpose == WakeupPurpose::OnDemandNonContinuous && count < 1)
        throw ConfigError("non-continuous on-demand request must ask for at least one packet");
}

WakeupDelivery deliver_wakeup(const WakeupSignal& signal, std::span<const WakeupReceiver> population,
                              std::span<const EntityId> intended)
{
    WakeupDelivery d;
    for (const auto& r : population) {
        if (!r.in_range || r.node == signal.origin)
            continue;
        if (signal.mode == WakeupMode::FrequencyAddressed && r.channel != signal.channel)
            continue;
        d.woken.push_back(r.node);
        if (std::find(intended.begin(), intended.end(), r.node) == intended.end())
            ++d.false_wakeups;
    }
    d.delivered_to_nobody = d.woken.empty();
    return d;
}

void EmergencyConfig::validate() const
{
    if (deadline == 0)
        throw ConfigError("[emergency] deadline_us must be > 0");
    if (sample_period == 0)
        throw ConfigError("[emergency] sample_us must be > 0");
    if (!std::isfinite(threshold) || !std::isfinite(start) || !std::isfinite(drift) || !std::isfinite(step_sigma))
        throw ConfigError("[emergency] reading process parameters must be finite");
    if (step_sigma < 0.0 || floor > ceiling)
        throw ConfigError("[emergency] requires step_sigma >= 0 and floor <= ceiling");
}

std::optional<EmergencyEvent> emergency_trigger(EntityId node, double reading, const EmergencyConfig& cfg,
                                                SimTime t)
{
    if (reading > cfg.threshold)
        return EmergencyEvent{node, t, reading};
    return std::nullopt;
}

std::optional<EmergencyEvent> EmergencyDetector::observe(EntityId node, double reading,
                                                         const EmergencyConfig& cfg, SimTime t)
{
    if (pending_)
        return std::nullopt;
    auto ev = emergency_trigger(node, reading, cfg, t);
    if (ev)
        pending_ = true;
    return ev;
}

OnDemandSession::OnDemandSession(EntityId target, SessionKind kind, std::uint32_t count)
    : target_(target), kind_(kind), count_(count)
{
    if (kind == SessionKind::NonContinuous && count < 1)
        throw ConfigError("non-continuous session needs count >= 1");
}

void OnDemandSession::on_woken()
{
    if (state_ == SessionState::Requested)
        state_ = SessionState::Streaming;
}

bool OnDemandSession::on_delivered()
{
    if (state_ == SessionState::Done)
        return false;
    ++delivered_;
    if (kind_ == SessionKind::NonContinuous && delivered_ >= count_) {
        state_ = SessionState::Done;
        return true;
    }
    return false;
}

void OnDemandSession::stop()
{
    state_ = SessionState::Done;
}

WakeupSignal OnDemandManager::request(EntityId coordinator, EntityId target, SessionKind kind, std::uint32_t count,
                                      WakeupMode mode, std::uint32_t target_channel, SimTime signal_duration)
{
    if (target >= node_count_) {
        ++rejected_;
        std::ostringstream os;
        os << "on-demand request to unknown node " << target;
        throw SessionRejected(os.str());
    }
    auto it = sessions_.find(target);
    if (it != sessions_.end() && it->second.active()) {
        ++rejected_;
        std::ostringstream os;
        os << "on-demand request to node " << target << " rejected: a session is already active";
        throw SessionRejected(os.str());
    }
    sessions_.insert_or_assign(target, OnDemandSession(target, kind, count));
    WakeupSignal s{coordinator,
                   mode,
                   target_channel,
                   kind == SessionKind::Continuous ? WakeupPurpose::OnDemandContinuous
                                                   : WakeupPurpose::OnDemandNonContinuous,
                   count,
                   signal_duration};
    s.validate();
    return s;
}

OnDemandSession* OnDemandManager::find(EntityId target)
{
    auto it = sessions_.find(target);
    return it == sessions_.end() ? nullptr : &it->second;
}

}  // namespace bsn
