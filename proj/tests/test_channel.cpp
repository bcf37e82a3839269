#include "bsn/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace bsn {
namespace {

LinkGeometry onbody_link(double d) { return {d, Placement::OnBody, Placement::OnBody, 0.0}; }
LinkGeometry implant_to_surface(double d, double depth) { return {d, Placement::InBody, Placement::OnBody, depth}; }

TEST(PathLoss, ReferenceDistanceIsPl0)
{
    ChannelParams p;
    EXPECT_DOUBLE_EQ(path_loss_db(onbody_link(p.d0_m), p), p.pl0_db);
}

TEST(PathLoss, HiddenImplantHandValue)
{
    // 40 + 35 log10(30) + 35 + 60 log10(1.5), evaluated by hand.
    ChannelParams p;
    const double pl = path_loss_db(implant_to_surface(3.0, 0.05), p);
    EXPECT_NEAR(pl, 137.2647, 1e-3);
    EXPECT_LT(received_power_dbm(0.0, implant_to_surface(3.0, 0.05), p), p.cca_threshold_dbm);
}

TEST(PathLoss, DoublingDistanceAtExponentTwo)
{
    ChannelParams p;
    p.exp_onbody = 2.0;
    const double delta = path_loss_db(onbody_link(1.0), p) - path_loss_db(onbody_link(0.5), p);
    EXPECT_NEAR(delta, 6.0206, 1e-4);
}

TEST(PathLoss, RejectsNonPositiveDistance)
{
    ChannelParams p;
    EXPECT_THROW(path_loss_db(onbody_link(0.0), p), DomainError);
    EXPECT_THROW(path_loss_db(onbody_link(-1.0), p), DomainError);
}

TEST(PathLoss, MonotoneInDistanceAndDepth)
{
    ChannelParams p;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.05, 5.0);
    std::uniform_real_distribution<double> z(0.0, 0.05);
    for (int i = 0; i < 1000; ++i) {
        const double a = d(rng);
        const double b = a + d(rng);
        const double depth = z(rng);
        EXPECT_LE(path_loss_db(implant_to_surface(a, depth), p), path_loss_db(implant_to_surface(b, depth), p));
        EXPECT_LE(path_loss_db(implant_to_surface(b, depth), p),
                  path_loss_db(implant_to_surface(b, depth + 0.01), p));
    }
}

TEST(Cca, QuietChannelIsIdle)
{
    ChannelParams p;
    const auto r = assess_channel(0, {}, p);
    EXPECT_EQ(r.verdict, CcaVerdict::Idle);
    EXPECT_NEAR(r.sensed_power_dbm, p.noise_floor_dbm, 1e-9);
}

TEST(Cca, HiddenImplantIsIdle)
{
    ChannelParams p;
    const ActiveTransmission tx{1, 0.0, implant_to_surface(3.0, 0.05)};
    EXPECT_EQ(assess_channel(0, std::span(&tx, 1), p).verdict, CcaVerdict::Idle);
}

TEST(Cca, NearbyOnBodyIsBusy)
{
    ChannelParams p;
    const ActiveTransmission tx{1, 0.0, onbody_link(1.0)};
    const auto r = assess_channel(0, std::span(&tx, 1), p);
    EXPECT_EQ(r.verdict, CcaVerdict::Busy);
    EXPECT_NEAR(r.sensed_power_dbm, mw_to_dbm(dbm_to_mw(-75.0) + dbm_to_mw(p.noise_floor_dbm)), 1e-6);
}

TEST(Cca, OwnTransmissionIgnored)
{
    ChannelParams p;
    const ActiveTransmission tx{0, 0.0, onbody_link(0.1)};
    EXPECT_EQ(assess_channel(0, std::span(&tx, 1), p).verdict, CcaVerdict::Idle);
}

TEST(Cca, VerdictFlipsExactlyAtThreshold)
{
    // Bisection over tx power: the flip point must sit where the sensed sum equals the threshold.
    ChannelParams p;
    const auto geom = onbody_link(2.0);
    double lo = -60.0;
    double hi = 20.0;
    auto busy = [&](double power) {
        const ActiveTransmission tx{1, power, geom};
        return assess_channel(0, std::span(&tx, 1), p).verdict == CcaVerdict::Busy;
    };
    ASSERT_FALSE(busy(lo));
    ASSERT_TRUE(busy(hi));
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (busy(mid) ? hi : lo) = mid;
    }
    const double signal_mw = dbm_to_mw(p.cca_threshold_dbm) - dbm_to_mw(p.noise_floor_dbm);
    const double expected = mw_to_dbm(signal_mw) + path_loss_db(geom, p);
    EXPECT_NEAR(hi, expected, 1e-6);
}

TEST(Cca, PowersAddInMilliwatts)
{
    ChannelParams p;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> d(0.1, 3.0);
    std::uniform_real_distribution<double> pw(-20.0, 5.0);
    const double noise = dbm_to_mw(p.noise_floor_dbm);
    for (int i = 0; i < 200; ++i) {
        const ActiveTransmission a{1, pw(rng), onbody_link(d(rng))};
        const ActiveTransmission b{2, pw(rng), onbody_link(d(rng))};
        const ActiveTransmission both[] = {a, b};
        const double sa = dbm_to_mw(assess_channel(0, std::span(&a, 1), p).sensed_power_dbm) - noise;
        const double sb = dbm_to_mw(assess_channel(0, std::span(&b, 1), p).sensed_power_dbm) - noise;
        const double sab = dbm_to_mw(assess_channel(0, both, p).sensed_power_dbm) - noise;
        EXPECT_NEAR(sab, sa + sb, 1e-9 * (sa + sb));
    }
}

Transmission tx(EntityId id, double power, double d, SimTime start, SimTime end)
{
    return {id, power, onbody_link(d), start, end};
}

TEST(Reception, SoleTransmissionDelivered)
{
    ChannelParams p;
    const auto r = resolve_reception(9, tx(1, 0.0, 0.5, 0, 100), {}, p);
    EXPECT_EQ(r.status, ReceptionStatus::Delivered);
}

TEST(Reception, BelowSensitivityLost)
{
    ChannelParams p;
    const auto r = resolve_reception(9, tx(1, 0.0, 20.0, 0, 100), {}, p);
    EXPECT_EQ(r.status, ReceptionStatus::LostBelowSensitivity);
}

TEST(Reception, EqualPowerOverlapCollidesBothWays)
{
    ChannelParams p;
    const auto a = tx(1, 0.0, 0.5, 0, 100);
    const auto b = tx(2, 0.0, 0.5, 50, 150);
    EXPECT_EQ(resolve_reception(9, a, std::span(&b, 1), p).status, ReceptionStatus::LostCollision);
    EXPECT_EQ(resolve_reception(9, b, std::span(&a, 1), p).status, ReceptionStatus::LostCollision);
}

TEST(Reception, CaptureAboveMargin)
{
    ChannelParams p;
    const auto intended = tx(1, 0.0, 0.5, 0, 100);
    const auto weak = tx(2, -15.0, 0.5, 0, 100);
    EXPECT_EQ(resolve_reception(9, intended, std::span(&weak, 1), p).status, ReceptionStatus::Delivered);
    const auto close = tx(2, -9.0, 0.5, 0, 100);
    EXPECT_EQ(resolve_reception(9, intended, std::span(&close, 1), p).status, ReceptionStatus::LostCollision);
}

TEST(Reception, HalfDuplexReceiverLoses)
{
    ChannelParams p;
    const auto intended = tx(1, 0.0, 0.5, 0, 100);
    const auto own = tx(9, -40.0, 0.5, 90, 120);
    EXPECT_EQ(resolve_reception(9, intended, std::span(&own, 1), p).status, ReceptionStatus::LostCollision);
}

TEST(Reception, NonOverlappingIgnored)
{
    ChannelParams p;
    const auto intended = tx(1, 0.0, 0.5, 0, 100);
    const auto later = tx(2, 0.0, 0.5, 100, 200);
    EXPECT_EQ(resolve_reception(9, intended, std::span(&later, 1), p).status, ReceptionStatus::Delivered);
}

TEST(Geometry, ValidateRejectsDepthBeyondDistance)
{
    EXPECT_THROW(implant_to_surface(0.02, 0.05).validate(), DomainError);
    EXPECT_NO_THROW(implant_to_surface(0.1, 0.05).validate());
}

}  // namespace
}  // namespace bsn
