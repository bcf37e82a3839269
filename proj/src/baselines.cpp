#include "bsn/baselines.hpp"

namespace bsn {

void DutyCycleConfig::validate() const
{
    if (listen_duration == 0 || sleep_duration == 0)
        throw ConfigError("[smac] listen_us and sleep_us must both be > 0 (duty cycle strictly inside (0,1))");
}

bool smac_listening(const DutyCycleConfig& cfg, SimTime t)
{
    return t % cfg.cycle() < cfg.listen_duration;
}

SimTime smac_next_listen(const DutyCycleConfig& cfg, SimTime t)
{
    if (smac_listening(cfg, t))
        return t;
    return (t / cfg.cycle() + 1) * cfg.cycle();
}

SimTime smac_listen_end(const DutyCycleConfig& cfg, SimTime t)
{
    return (t / cfg.cycle()) * cfg.cycle() + cfg.listen_duration;
}

MacAction smac_step(SimTime t, const DutyCycleConfig& cfg, std::size_t queued)
{
    if (!smac_listening(cfg, t))
        return MacAction::Sleep;
    return queued > 0 ? MacAction::Contend : MacAction::IdleListen;
}

void PreambleSlotConfig::validate() const
{
    if (slot_duration == 0 || preamble_duration >= slot_duration)
        throw ConfigError("[pbtdma] requires slot_us > preamble_us");
}

std::uint64_t pbtdma_slot_index(const PreambleSlotConfig& cfg, SimTime t)
{
    return t / cfg.slot_duration;
}

EntityId pbtdma_owner(const PreambleSlotConfig& cfg, SimTime t, std::size_t node_count)
{
    return static_cast<EntityId>(pbtdma_slot_index(cfg, t) % node_count);
}

MacAction pbtdma_step(EntityId node, SimTime t, const PreambleSlotConfig& cfg, std::size_t node_count,
                      std::size_t queued)
{
    if (t % cfg.slot_duration < cfg.preamble_duration)
        return MacAction::Receive;
    if (pbtdma_owner(cfg, t, node_count) != node)
        return MacAction::Sleep;
    return queued > 0 ? MacAction::Transmit : MacAction::IdleListen;
}

}  // namespace bsn
