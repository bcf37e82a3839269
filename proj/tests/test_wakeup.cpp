#include "bsn/wakeup.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <algorithm>

namespace bsn {
namespace {

TEST(Trigger, StrictlyAboveThreshold)
{
    EmergencyConfig cfg;
    EXPECT_FALSE(emergency_trigger(0, 4.0, cfg, 10));
    const auto ev = emergency_trigger(3, 4.0001, cfg, 10);
    ASSERT_TRUE(ev);
    EXPECT_EQ(ev->node, 3U);
    EXPECT_EQ(ev->at, 10U);
}

TEST(Trigger, DetectorSuppressesUntilResolved)
{
    EmergencyConfig cfg;
    EmergencyDetector d;
    EXPECT_TRUE(d.observe(0, 5.0, cfg, 1));
    EXPECT_FALSE(d.observe(0, 6.0, cfg, 2));
    d.resolve();
    EXPECT_FALSE(d.observe(0, 3.0, cfg, 3));
    EXPECT_TRUE(d.observe(0, 7.0, cfg, 4));
}

std::vector<WakeupReceiver> population(std::size_t n)
{
    std::vector<WakeupReceiver> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({static_cast<EntityId>(i), static_cast<std::uint32_t>(i + 1)});
    return out;
}

WakeupSignal signal(WakeupMode mode, std::uint32_t channel, EntityId origin = 100)
{
    return {origin, mode, channel, WakeupPurpose::Emergency, 0, milliseconds(1)};
}

TEST(Delivery, BroadcastWakesEveryone)
{
    const auto pop = population(5);
    const EntityId intended[] = {2};
    const auto d = deliver_wakeup(signal(WakeupMode::Broadcast, 0), pop, intended);
    EXPECT_EQ(d.woken.size(), 5U);
    EXPECT_EQ(d.false_wakeups, 4U);
}

TEST(Delivery, AddressedWakesOnlyTheTunedReceiver)
{
    const auto pop = population(5);
    const EntityId intended[] = {2};
    const auto d = deliver_wakeup(signal(WakeupMode::FrequencyAddressed, 3), pop, intended);
    EXPECT_EQ(d.woken, (std::vector<EntityId>{2}));
    EXPECT_EQ(d.false_wakeups, 0U);
}

TEST(Delivery, UnusedChannelWakesNobody)
{
    const auto pop = population(5);
    const EntityId intended[] = {2};
    const auto d = deliver_wakeup(signal(WakeupMode::FrequencyAddressed, 9), pop, intended);
    EXPECT_TRUE(d.woken.empty());
    EXPECT_TRUE(d.delivered_to_nobody);
}

TEST(Delivery, SenderAndOutOfRangeExcluded)
{
    auto pop = population(4);
    pop[3].in_range = false;
    const auto d = deliver_wakeup(signal(WakeupMode::Broadcast, 0, 0), pop, {});
    EXPECT_EQ(d.woken, (std::vector<EntityId>{1, 2}));
    EXPECT_EQ(d.false_wakeups, 2U);
}

TEST(Signal, Validation)
{
    auto s = signal(WakeupMode::Broadcast, 0);
    s.duration = 0;
    EXPECT_THROW(s.validate(), ConfigError);
    s = signal(WakeupMode::Broadcast, 0);
    s.purpose = WakeupPurpose::OnDemandNonContinuous;
    s.count = 0;
    EXPECT_THROW(s.validate(), ConfigError);
}

TEST(Sessions, NonContinuousClosesOnLastDelivery)
{
    OnDemandManager m(3);
    const auto sig = m.request(3, 1, SessionKind::NonContinuous, 5, WakeupMode::FrequencyAddressed, 2, 1000);
    EXPECT_EQ(sig.count, 5U);
    EXPECT_EQ(sig.purpose, WakeupPurpose::OnDemandNonContinuous);
    auto* s = m.find(1);
    ASSERT_NE(s, nullptr);
    s->on_woken();
    EXPECT_EQ(s->state(), SessionState::Streaming);
    for (int i = 0; i < 4; ++i)
        EXPECT_FALSE(s->on_delivered());
    EXPECT_TRUE(s->on_delivered());
    EXPECT_FALSE(s->active());
}

TEST(Sessions, SecondRequestWhileActiveRejected)
{
    OnDemandManager m(3);
    m.request(3, 0, SessionKind::Continuous, 0, WakeupMode::Broadcast, 0, 1000);
    EXPECT_THROW(m.request(3, 0, SessionKind::NonContinuous, 2, WakeupMode::Broadcast, 0, 1000), SessionRejected);
    EXPECT_THROW(m.request(3, 7, SessionKind::NonContinuous, 2, WakeupMode::Broadcast, 0, 1000), SessionRejected);
    EXPECT_EQ(m.rejected(), 2U);
    m.find(0)->stop();
    EXPECT_NO_THROW(m.request(3, 0, SessionKind::NonContinuous, 2, WakeupMode::Broadcast, 0, 1000));
}

// Simulation-level behaviour of the pattern TDMA wake-up paths.

Scenario emergency_scenario(const std::vector<std::string>& patterns, Rate rate, SimTime duration,
                            std::vector<std::string> emergency_nodes, SimTime reading_at)
{
    auto s = test::pattern_scenario(patterns, rate, duration);
    for (std::size_t i = 0; i < s.nodes.size(); ++i)
        s.nodes[i].wakeup_channel = static_cast<std::uint32_t>(i + 1);
    if (!emergency_nodes.empty()) {
        EmergencySection e;
        e.config.start = 5.0;
        e.config.step_sigma = 0.0;
        e.config.sample_period = reading_at;
        e.nodes = std::move(emergency_nodes);
        s.emergency = e;
    }
    return s;
}

std::vector<Packet> of_class(const std::vector<Packet>& packets, TrafficClass c)
{
    std::vector<Packet> out;
    std::copy_if(packets.begin(), packets.end(), std::back_inserter(out), [c](const Packet& p) { return p.cls == c; });
    return out;
}

TEST(EmergencySim, SingleEmergencyServedWithinFewSlots)
{
    const auto s = emergency_scenario({"100", "010", "001"}, Rate{0.0, Rate::Unit::PerActiveFrame}, seconds(2),
                                      {"n1"}, milliseconds(1234));
    const auto r = simulate(s, 1);
    const auto em = of_class(r.packets, TrafficClass::Emergency);
    ASSERT_EQ(em.size(), 1U);
    ASSERT_TRUE(em[0].delivered_at);
    EXPECT_EQ(em[0].created_at, milliseconds(1234));
    EXPECT_LE(*em[0].delivered_at - em[0].created_at, 3 * s.ptdma.slot_duration);
    EXPECT_EQ(r.report.deadline_misses, 0U);
}

TEST(EmergencySim, OccupiedSlotIsNotPreempted)
{
    // Frame 50 starts at 1.5 s; n0 owns slot 0 and has a packet waiting.
    const auto s = emergency_scenario({"1", "1", "1"}, Rate{1.0, Rate::Unit::PerActiveFrame}, seconds(2), {"n2"},
                                      milliseconds(1500));
    RunOptions opts;
    opts.keep_tx_log = true;
    const auto r = simulate(s, 1, opts);
    const auto em = of_class(r.packets, TrafficClass::Emergency);
    ASSERT_EQ(em.size(), 1U);
    ASSERT_TRUE(em[0].tx_start);
    const bool n0_sent_in_window = std::any_of(r.tx_log.begin(), r.tx_log.end(), [](const TxLogEntry& e) {
        return e.tx == 0 && e.kind == TxKind::Data && e.start == milliseconds(1500);
    });
    EXPECT_TRUE(n0_sent_in_window);
    EXPECT_GE(*em[0].tx_start, milliseconds(1510));
    EXPECT_TRUE(em[0].delivered_at);
    EXPECT_EQ(r.report.counters.data_overlaps, 0U);
}

TEST(EmergencySim, SimultaneousEmergenciesBothDelivered)
{
    const auto s = emergency_scenario({"10", "01", "01"}, Rate{0.0, Rate::Unit::PerActiveFrame}, seconds(2),
                                      {"n0", "n2"}, milliseconds(777));
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = simulate(s, seed);
        auto em = of_class(r.packets, TrafficClass::Emergency);
        // The reading stays high, so later samples raise fresh emergencies once resolved.
        std::erase_if(em, [](const Packet& p) { return p.created_at != milliseconds(777); });
        ASSERT_EQ(em.size(), 2U);
        for (const auto& p : em) {
            ASSERT_TRUE(p.delivered_at) << "seed " << seed;
            EXPECT_LT(*p.delivered_at - p.created_at, seconds(1));
        }
    }
}

TEST(EmergencySim, AddressedModeHasNoFalseWakeups)
{
    auto s = emergency_scenario({"100", "010", "001"}, Rate{0.0, Rate::Unit::PerActiveFrame}, seconds(2), {"n1"},
                                milliseconds(500));
    const auto addressed = run_scenario(s, 1);
    EXPECT_EQ(addressed.counters.false_wakeups, 0U);
    EXPECT_GT(addressed.counters.wakeup_signals, 0U);
    s.wakeup.mode = WakeupMode::Broadcast;
    const auto broadcast = run_scenario(s, 1);
    EXPECT_GT(broadcast.counters.false_wakeups, 0U);
}

TEST(OnDemandSim, NonContinuousDeliversRequestedCount)
{
    auto s = emergency_scenario({"100", "010", "001"}, Rate{0.0, Rate::Unit::PerActiveFrame}, seconds(2), {}, 0);
    s.ondemand.requests.push_back({milliseconds(300), "n2", SessionKind::NonContinuous, 5});
    s.ondemand.requests.push_back({milliseconds(301), "n2", SessionKind::NonContinuous, 3});
    const auto r = simulate(s, 1);
    const auto od = of_class(r.packets, TrafficClass::OnDemandNonContinuous);
    EXPECT_EQ(od.size(), 5U);
    for (const auto& p : od)
        EXPECT_TRUE(p.delivered_at);
    EXPECT_EQ(r.report.counters.ondemand_rejected, 1U);
}

TEST(OnDemandSim, ContinuousStreamStopsAndNodeReturnsToPattern)
{
    auto s = emergency_scenario({"100", "010", "001"}, Rate{0.0, Rate::Unit::PerActiveFrame}, seconds(2), {}, 0);
    const SimTime stop = milliseconds(600);
    s.ondemand.requests.push_back({milliseconds(300), "n0", SessionKind::Continuous, stop});
    RunOptions opts;
    opts.keep_tx_log = true;
    const auto r = simulate(s, 1, opts);
    const auto od = of_class(r.packets, TrafficClass::OnDemandContinuous);
    // One packet per 30 ms frame from the wake-up at 301 ms until the stop.
    EXPECT_EQ(od.size(), 10U);
    for (const auto& p : od) {
        EXPECT_LT(p.created_at, stop);
        EXPECT_TRUE(p.delivered_at);
    }
    const SimTime hp = 3 * milliseconds(30);
    for (const auto& e : r.tx_log)
        if (e.tx == 0 && e.kind == TxKind::Data)
            EXPECT_LT(e.start, stop + hp);
    EXPECT_EQ(r.report.counters.ondemand_rejected, 0U);
}

}  // namespace
}  // namespace bsn
