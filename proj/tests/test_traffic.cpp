#include "bsn/traffic.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace bsn {
namespace {

TEST(Classify, ByOrigin)
{
    EXPECT_EQ(classify({PacketOrigin::PeriodicRead, std::nullopt}), TrafficClass::Normal);
    EXPECT_EQ(classify({PacketOrigin::ThresholdEvent, std::nullopt}), TrafficClass::Emergency);
    EXPECT_EQ(classify({PacketOrigin::CoordinatorRequest, SessionKind::Continuous}), TrafficClass::OnDemandContinuous);
    EXPECT_EQ(classify({PacketOrigin::CoordinatorRequest, SessionKind::NonContinuous}),
              TrafficClass::OnDemandNonContinuous);
    EXPECT_THROW(classify({PacketOrigin::CoordinatorRequest, std::nullopt}), ClassificationError);
    EXPECT_THROW(classify({static_cast<PacketOrigin>(9), std::nullopt}), ClassificationError);
}

TEST(RateParse, Units)
{
    EXPECT_EQ(Rate::parse("2/frame"), (Rate{2.0, Rate::Unit::PerActiveFrame}));
    EXPECT_EQ(Rate::parse("5/s"), (Rate{5.0, Rate::Unit::PerSecond}));
    EXPECT_DOUBLE_EQ(Rate::parse("30/min").value, 0.5);
    EXPECT_DOUBLE_EQ(Rate::parse("36/hour").value, 0.01);
    EXPECT_DOUBLE_EQ(Rate::parse("864/day").value, 0.01);
    EXPECT_DOUBLE_EQ(Rate::parse("6048/week").value, 0.01);
    EXPECT_THROW(Rate::parse("5"), ConfigError);
    EXPECT_THROW(Rate::parse("-1/s"), ConfigError);
    EXPECT_THROW(Rate::parse("1/fortnight"), ConfigError);
    EXPECT_EQ(Rate::parse(Rate::parse("0.25/frame").to_string()), Rate::parse("0.25/frame"));
}

TEST(Normal, PinnedOnePerActiveFrame)
{
    const auto pattern = WakeupPattern::parse("011");
    const FrameGrid grid{milliseconds(30), 0};
    Rng rng(1);
    const auto t = generate_normal(Rate{1.0, Rate::Unit::PerActiveFrame}, ArrivalMode::Pinned, &pattern, grid,
                                   milliseconds(90), rng);
    EXPECT_EQ(t, (std::vector<SimTime>{milliseconds(30), milliseconds(60)}));
}

TEST(Normal, PinnedArrivalsPrecedeOwnWindow)
{
    const auto pattern = WakeupPattern::parse("0110");
    const FrameGrid grid{milliseconds(40), milliseconds(20)};
    Rng rng(2);
    const auto t = generate_normal(Rate{2.5, Rate::Unit::PerActiveFrame}, ArrivalMode::Pinned, &pattern, grid,
                                   seconds(10), rng);
    ASSERT_FALSE(t.empty());
    for (SimTime a : t) {
        const auto f = a / grid.frame_duration;
        EXPECT_TRUE(pattern.active(f % 4));
        EXPECT_LE(a % grid.frame_duration, grid.window_offset);
    }
    EXPECT_TRUE(std::is_sorted(t.begin(), t.end()));
}

TEST(Normal, ZeroRateIsEmpty)
{
    Rng rng(3);
    EXPECT_TRUE(generate_normal(Rate{0.0, Rate::Unit::PerSecond}, ArrivalMode::Free, nullptr, std::nullopt,
                                seconds(10), rng)
                    .empty());
    EXPECT_THROW(generate_normal(Rate{1.0, Rate::Unit::PerActiveFrame}, ArrivalMode::Free, nullptr, std::nullopt,
                                 seconds(10), rng),
                 ConfigError);
}

TEST(Normal, FreeRateFidelity)
{
    Rng rng(4);
    const double per_s = 50.0;
    const auto t = generate_normal(Rate{per_s, Rate::Unit::PerSecond}, ArrivalMode::Free, nullptr, std::nullopt,
                                   seconds(1000), rng);
    const double observed = static_cast<double>(t.size()) / 1000.0;
    EXPECT_NEAR(observed, per_s, 0.05 * per_s);
    EXPECT_LT(t.back(), seconds(1000));
}

TEST(Normal, PerFrameFreeRateMatchesActiveFraction)
{
    const auto pattern = WakeupPattern::parse("0101");
    const FrameGrid grid{milliseconds(20), 0};
    Rng rng(5);
    const auto t = generate_normal(Rate{1.0, Rate::Unit::PerActiveFrame}, ArrivalMode::Free, &pattern, grid,
                                   seconds(2000), rng);
    // 50 frames/s, half active.
    EXPECT_NEAR(static_cast<double>(t.size()) / 2000.0, 25.0, 25.0 * 0.05);
}

TEST(Normal, SameStreamSameArrivals)
{
    Rng a(77);
    Rng b(77);
    const Rate r{3.0, Rate::Unit::PerSecond};
    EXPECT_EQ(generate_normal(r, ArrivalMode::Free, nullptr, std::nullopt, seconds(100), a),
              generate_normal(r, ArrivalMode::Free, nullptr, std::nullopt, seconds(100), b));
}

TEST(Emergency, ConstantAboveThresholdTriggersEverySample)
{
    EmergencyConfig cfg;
    cfg.start = 5.0;
    cfg.step_sigma = 0.0;
    Rng rng(1);
    const auto readings = generate_emergency(cfg, seconds(1), rng);
    ASSERT_EQ(readings.size(), 9U);
    EXPECT_EQ(readings.front().at, cfg.sample_period);
    for (const auto& r : readings)
        EXPECT_TRUE(emergency_trigger(0, r.value, cfg, r.at));
}

TEST(Emergency, UnreachableThresholdNeverTriggers)
{
    EmergencyConfig cfg;
    cfg.threshold = 10.0;
    Rng rng(2);
    for (const auto& r : generate_emergency(cfg, seconds(600), rng)) {
        EXPECT_LE(r.value, cfg.ceiling);
        EXPECT_GE(r.value, cfg.floor);
        EXPECT_FALSE(emergency_trigger(0, r.value, cfg, r.at));
    }
}

TEST(Emergency, ReplayMatchesIndependentWalk)
{
    EmergencyConfig cfg;
    cfg.drift = 0.01;
    Rng a(9);
    Rng b(9);
    const auto readings = generate_emergency(cfg, seconds(300), a);
    std::normal_distribution<double> n(0.0, 1.0);
    double v = cfg.start;
    ASSERT_EQ(readings.size(), 2999U);
    for (std::size_t i = 0; i < readings.size(); ++i) {
        v = std::min(cfg.ceiling, std::max(cfg.floor, v + cfg.drift + cfg.step_sigma * n(b)));
        ASSERT_EQ(readings[i].at, (i + 1) * cfg.sample_period);
        ASSERT_DOUBLE_EQ(readings[i].value, v);
    }
}

TEST(Emergency, ExceedanceNearStationaryShare)
{
    // A clamped symmetric walk spreads roughly uniformly over [floor, ceiling], so about
    // (ceiling - threshold) / (ceiling - floor) of readings exceed the threshold.
    EmergencyConfig cfg;
    Rng rng(10);
    const auto readings = generate_emergency(cfg, seconds(200000), rng);
    const auto above = std::count_if(readings.begin(), readings.end(), [&](const Reading& r) { return r.value > cfg.threshold; });
    const double share = static_cast<double>(above) / static_cast<double>(readings.size());
    const double expected = (cfg.ceiling - cfg.threshold) / (cfg.ceiling - cfg.floor);
    EXPECT_GT(share, expected / 3.0);
    EXPECT_LT(share, expected * 3.0);
}

TEST(DataRate, Envelope)
{
    EXPECT_NO_THROW(validate_data_rate(10e3));
    EXPECT_NO_THROW(validate_data_rate(250e3));
    EXPECT_NO_THROW(validate_data_rate(10e6));
    EXPECT_THROW(validate_data_rate(9999.0), ConfigError);
    EXPECT_THROW(validate_data_rate(10e6 + 1), ConfigError);
    EXPECT_THROW(validate_data_rate(std::nan("")), ConfigError);
}

}  // namespace
}  // namespace bsn
