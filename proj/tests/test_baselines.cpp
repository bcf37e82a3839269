#include "bsn/baselines.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <random>

namespace bsn {
namespace {

TEST(Smac, ListenPhaseAlignedAtZero)
{
    DutyCycleConfig cfg;
    EXPECT_TRUE(smac_listening(cfg, 0));
    EXPECT_TRUE(smac_listening(cfg, milliseconds(114)));
    EXPECT_FALSE(smac_listening(cfg, milliseconds(115)));
    EXPECT_TRUE(smac_listening(cfg, seconds(1)));
    EXPECT_EQ(smac_next_listen(cfg, milliseconds(50)), milliseconds(50));
    EXPECT_EQ(smac_next_listen(cfg, milliseconds(200)), seconds(1));
    EXPECT_EQ(smac_listen_end(cfg, milliseconds(1050)), milliseconds(1115));
}

TEST(Smac, StepFollowsPhaseAndQueue)
{
    DutyCycleConfig cfg;
    EXPECT_EQ(smac_step(10, cfg, 1), MacAction::Contend);
    EXPECT_EQ(smac_step(10, cfg, 0), MacAction::IdleListen);
    EXPECT_EQ(smac_step(milliseconds(500), cfg, 3), MacAction::Sleep);
}

TEST(Smac, AddedWaitBoundedBySleepPeriod)
{
    DutyCycleConfig cfg;
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<SimTime> at(0, seconds(100));
    for (int i = 0; i < 100000; ++i) {
        const SimTime t = at(rng);
        const SimTime next = smac_next_listen(cfg, t);
        ASSERT_GE(next, t);
        ASSERT_LE(next - t, cfg.sleep_duration);
        ASSERT_TRUE(smac_listening(cfg, next));
    }
}

TEST(Smac, DegenerateDutyCycleRejected)
{
    DutyCycleConfig cfg;
    cfg.sleep_duration = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = {};
    cfg.listen_duration = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    EXPECT_NEAR(DutyCycleConfig{}.duty_cycle(), 0.115, 1e-12);
}

TEST(Pbtdma, RoundRobinOwners)
{
    PreambleSlotConfig cfg;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const SimTime t = k * cfg.slot_duration + 7;
        EXPECT_EQ(pbtdma_slot_index(cfg, t), k);
        EXPECT_EQ(pbtdma_owner(cfg, t, 3), static_cast<EntityId>(k % 3));
    }
}

TEST(Pbtdma, StepPerPhase)
{
    PreambleSlotConfig cfg;
    EXPECT_EQ(pbtdma_step(1, 100, cfg, 3, 0), MacAction::Receive);
    EXPECT_EQ(pbtdma_step(0, milliseconds(10), cfg, 3, 2), MacAction::Transmit);
    EXPECT_EQ(pbtdma_step(0, milliseconds(10), cfg, 3, 0), MacAction::IdleListen);
    EXPECT_EQ(pbtdma_step(1, milliseconds(10), cfg, 3, 2), MacAction::Sleep);
    PreambleSlotConfig bad;
    bad.preamble_duration = bad.slot_duration;
    EXPECT_THROW(bad.validate(), ConfigError);
}

Scenario idle_scenario(MacKind mac, std::size_t nodes, SimTime duration)
{
    Scenario s;
    s.name = "idle";
    s.mac = mac;
    s.duration = duration;
    s.traffic.arrivals = ArrivalMode::Free;
    for (std::size_t i = 0; i < nodes; ++i)
        s.nodes.push_back(test::onbody("n" + std::to_string(i), 0.3, 40.0 * static_cast<double>(i)));
    return s;
}

TEST(SmacLedger, IdleNodeEnergyPerCycle)
{
    const auto s = idle_scenario(MacKind::Smac, 1, seconds(10));
    const auto r = run_scenario(s, 1);
    const double listen_s = 0.115;
    const double sleep_s = 0.885;
    const double expected = 10 * (listen_s * s.power.idle_listen_mw + sleep_s * s.power.sleep_mw);
    ASSERT_EQ(r.nodes.size(), 1U);
    EXPECT_NEAR(r.nodes[0].energy_mj, expected, 1e-9);
    EXPECT_NEAR(r.coordinator.energy_mj, 10 * (listen_s * s.power.receive_mw + sleep_s * s.power.sleep_mw), 1e-9);
}

TEST(PbtdmaLedger, IdleEnergyPerSlot)
{
    const auto s = idle_scenario(MacKind::Pbtdma, 2, seconds(1));
    const auto r = run_scenario(s, 1);
    // 20 slots: every node hears 20 preambles, owns 10 slots and sleeps through 10.
    const double expected = 20 * 0.005 * s.power.receive_mw + 10 * 0.045 * s.power.idle_listen_mw
                            + 10 * 0.045 * s.power.sleep_mw;
    ASSERT_EQ(r.nodes.size(), 2U);
    EXPECT_NEAR(r.nodes[0].energy_mj, expected, 1e-9);
    EXPECT_NEAR(r.nodes[1].energy_mj, expected, 1e-9);
}

TEST(PbtdmaSim, NeverCollides)
{
    auto s = idle_scenario(MacKind::Pbtdma, 4, seconds(20));
    s.traffic.rate = Rate{10.0, Rate::Unit::PerSecond};
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto r = run_scenario(s, seed);
        EXPECT_GT(r.overall.delivered, 0U);
        EXPECT_EQ(r.counters.collisions, 0U);
        EXPECT_EQ(r.counters.data_overlaps, 0U);
    }
}

TEST(SmacSim, IdleNodesSpendLessThanAlwaysOn)
{
    const auto smac = run_scenario(idle_scenario(MacKind::Smac, 3, seconds(5)), 1);
    const auto csma = run_scenario(idle_scenario(MacKind::Csma, 3, seconds(5)), 1);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_LT(smac.nodes[i].energy_mj, csma.nodes[i].energy_mj);
    EXPECT_LT(smac.coordinator.energy_mj, csma.coordinator.energy_mj);
}

}  // namespace
}  // namespace bsn
