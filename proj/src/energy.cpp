#include "bsn/energy.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace bsn {

std::string_view to_string(RadioState s)
{
    switch (s) {
    case RadioState::Transmit: return "transmit";
    case RadioState::Receive: return "receive";
    case RadioState::CcaSense: return "cca";
    case RadioState::IdleListen: return "idle_listen";
    case RadioState::Sleep: return "sleep";
    case RadioState::WakeupListen: return "wakeup_listen";
    }
    return "?";
}

double PowerProfile::power(RadioState s) const
{
    switch (s) {
    case RadioState::Transmit: return transmit_mw;
    case RadioState::Receive: return receive_mw;
    case RadioState::CcaSense: return cca_mw;
    case RadioState::IdleListen: return idle_listen_mw;
    case RadioState::Sleep: return sleep_mw;
    case RadioState::WakeupListen: return wakeup_listen_mw;
    }
    return 0.0;
}

void PowerProfile::validate() const
{
    const double lowest_active = std::min({transmit_mw, receive_mw, cca_mw, idle_listen_mw});
    if (!(sleep_mw >= 0.0 && sleep_mw < wakeup_listen_mw && wakeup_listen_mw < lowest_active))
        throw ConfigError("[power] requires sleep_mw < wakeup_listen_mw < every active-state power");
}

EnergyLedger::EnergyLedger(std::size_t entity_count, PowerProfile power, RadioState initial)
    : power_(power), entities_(entity_count, Entity{initial})
{
}

void EnergyLedger::accrue_state(EntityId entity, RadioState state, SimTime t)
{
    if (finalized_)
        throw LedgerError("energy ledger already finalized");
    Entity& e = entities_.at(entity);
    if (t < e.since) {
        std::ostringstream os;
        os << "ledger corruption: entity " << entity << " transition to " << to_string(state) << " at t=" << t
           << " precedes its previous transition at t=" << e.since;
        throw LedgerError(os.str());
    }
    e.durations[static_cast<std::size_t>(e.state)] += t - e.since;
    e.state = state;
    e.since = t;
    ++transitions_;
}

void EnergyLedger::finalize(SimTime t)
{
    for (EntityId i = 0; i < entities_.size(); ++i)
        accrue_state(i, entities_[i].state, t);
    finalized_ = true;
}

SimTime EnergyLedger::duration(EntityId entity, RadioState s) const
{
    return entities_.at(entity).durations[static_cast<std::size_t>(s)];
}

SimTime EnergyLedger::total_duration(EntityId entity) const
{
    const auto& d = entities_.at(entity).durations;
    return std::accumulate(d.begin(), d.end(), SimTime{0});
}

double EnergyLedger::energy_mj(EntityId entity) const
{
    double nj = 0.0;  // mW * us = nJ
    const auto& d = entities_.at(entity).durations;
    for (std::size_t s = 0; s < kRadioStateCount; ++s)
        nj += power_.power(static_cast<RadioState>(s)) * static_cast<double>(d[s]);
    return nj * 1e-6;
}

double EnergyLedger::sleep_ratio(EntityId entity) const
{
    const SimTime total = total_duration(entity);
    if (total == 0)
        return 0.0;
    const SimTime asleep = duration(entity, RadioState::Sleep) + duration(entity, RadioState::WakeupListen);
    return static_cast<double>(asleep) / static_cast<double>(total);
}

}  // namespace bsn
