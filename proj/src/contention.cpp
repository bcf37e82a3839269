#include "bsn/contention.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace bsn {

std::string_view to_string(Priority p)
{
    return p == Priority::Critical ? "critical" : "noncritical";
}

void BackoffConfig::validate() const
{
    if (w0_critical < 1 || w0_noncritical < 1 || w0_standard < 1)
        throw ConfigError("[csma] initial back-off windows must be >= 1");
    if (w0_critical > w0_noncritical) {
        std::ostringstream os;
        os << "[csma] w0_critical (" << w0_critical << ") must not exceed w0_noncritical (" << w0_noncritical
           << "): critical traffic requires (W_0^α ≤ W_0^β)";
        throw ConfigError(os.str());
    }
    if (max_attempts < 1)
        throw ConfigError("[csma] max_attempts must be >= 1");
    if (max_doublings > 20)
        throw ConfigError("[csma] max_doublings must be <= 20");
    if (backoff_slot == 0)
        throw ConfigError("[csma] backoff_slot_us must be > 0");
}

std::uint32_t initial_window(Priority cls, const BackoffConfig& cfg)
{
    return cls == Priority::Critical ? cfg.w0_critical : cfg.w0_noncritical;
}

CsmaState::CsmaState(std::uint32_t w0, const BackoffConfig& cfg)
    : w0_(w0), window_(w0), max_doublings_(cfg.max_doublings), max_attempts_(cfg.max_attempts)
{
    if (w0 < 1)
        throw ConfigError("back-off window must be >= 1");
}

std::uint32_t CsmaState::draw(Rng& rng)
{
    std::uniform_int_distribution<std::uint32_t> dist(0, window_ - 1);
    pending_ = dist(rng);
    return pending_;
}

void CsmaState::reset()
{
    window_ = w0_;
    attempts_ = 0;
    pending_ = 0;
}

MacAction csma_step(CsmaState& state, const CcaResult& cca, Rng& rng)
{
    if (cca.verdict == CcaVerdict::Idle)
        return MacAction::Transmit;
    ++state.attempts_;
    if (state.attempts_ >= state.max_attempts_)
        return MacAction::AccessFailure;
    const std::uint32_t doublings = std::min(state.attempts_, state.max_doublings_);
    state.window_ = state.w0_ << doublings;
    state.draw(rng);
    return MacAction::Backoff;
}

void SuperframeConfig::validate() const
{
    if (beacon_interval == 0)
        throw ConfigError("[superframe] beacon_interval_us must be > 0");
    if (beacon_duration >= cap_duration)
        throw ConfigError("[superframe] beacon_us must be shorter than cap_us");
    if (cap_duration + gts_slot_count * gts_slot_duration > beacon_interval)
        throw ConfigError("[superframe] cap_us + gts_slots * gts_slot_us must not exceed beacon_interval_us");
    if (gts_expiry_frames < 1)
        throw ConfigError("[superframe] gts_expiry_frames must be >= 1");
    if (gts_slot_count > 0 && gts_slot_duration == 0)
        throw ConfigError("[superframe] gts_slot_us must be > 0");
}

SuperframeLayout superframe_layout(const SuperframeConfig& cfg, std::uint64_t index)
{
    const SimTime base = index * cfg.beacon_interval;
    SuperframeLayout l;
    l.index = index;
    l.beacon = {base, base + cfg.beacon_duration};
    l.cap = {base, base + cfg.cap_duration};
    SimTime t = l.cap.end;
    for (std::uint32_t i = 0; i < cfg.gts_slot_count; ++i) {
        l.gts.push_back({t, t + cfg.gts_slot_duration});
        t += cfg.gts_slot_duration;
    }
    l.inactive = {t, base + cfg.beacon_interval};
    return l;
}

SuperframePosition superframe_position(const SuperframeConfig& cfg, SimTime t)
{
    const std::uint64_t index = t / cfg.beacon_interval;
    const SimTime rel = t % cfg.beacon_interval;
    if (rel < cfg.beacon_duration)
        return {index, SuperframePhase::Beacon, 0};
    if (rel < cfg.cap_duration)
        return {index, SuperframePhase::Cap, 0};
    const SimTime gts_end = cfg.cap_duration + cfg.gts_slot_count * cfg.gts_slot_duration;
    if (rel < gts_end)
        return {index, SuperframePhase::Gts, static_cast<std::uint32_t>((rel - cfg.cap_duration) / cfg.gts_slot_duration)};
    return {index, SuperframePhase::Inactive, 0};
}

GtsManager::GtsManager(const SuperframeConfig& cfg)
    : expiry_(cfg.gts_expiry_frames), owners_(cfg.gts_slot_count), idle_(cfg.gts_slot_count, 0)
{
}

GtsManager::BeaconResult GtsManager::on_beacon(std::span<const EntityId> requests,
                                               const std::set<EntityId>& used_last_superframe)
{
    BeaconResult r;
    if (!first_beacon_) {
        for (std::size_t s = 0; s < owners_.size(); ++s) {
            if (!owners_[s])
                continue;
            if (used_last_superframe.count(*owners_[s])) {
                idle_[s] = 0;
                continue;
            }
            if (++idle_[s] >= expiry_) {
                r.revoked.push_back(*owners_[s]);
                owners_[s].reset();
                idle_[s] = 0;
                ++revoked_total_;
            }
        }
    }
    first_beacon_ = false;

    for (EntityId node : requests) {
        if (slot_of(node))
            continue;
        auto free = std::find_if(owners_.begin(), owners_.end(), [](const auto& o) { return !o.has_value(); });
        if (free == owners_.end()) {
            r.denied.push_back(node);
            ++denied_total_;
            continue;
        }
        *free = node;
        idle_[static_cast<std::size_t>(free - owners_.begin())] = 0;
        r.granted.push_back(node);
    }
    return r;
}

std::optional<std::uint32_t> GtsManager::slot_of(EntityId node) const
{
    for (std::size_t s = 0; s < owners_.size(); ++s)
        if (owners_[s] == node)
            return static_cast<std::uint32_t>(s);
    return std::nullopt;
}

GtsTraceResult gts_manage(std::span<const GtsBeaconInput> history, const SuperframeConfig& cfg)
{
    GtsManager mgr(cfg);
    GtsTraceResult out;
    for (std::size_t b = 0; b < history.size(); ++b) {
        auto r = mgr.on_beacon(history[b].requests, history[b].used_last_superframe);
        for (auto n : r.revoked)
            out.revocations.emplace_back(b, n);
    }
    for (std::size_t s = 0; s < mgr.allocation().size(); ++s)
        if (mgr.allocation()[s])
            out.allocation.emplace(static_cast<std::uint32_t>(s), *mgr.allocation()[s]);
    out.denied = mgr.denied_total();
    return out;
}

}  // namespace bsn
