#include "bsn/channel.hpp"

#include <cmath>
#include <sstream>

namespace bsn {

std::string_view to_string(Placement p)
{
    return p == Placement::InBody ? "inbody" : "onbody";
}

std::string_view to_string(ReceptionStatus s)
{
    switch (s) {
    case ReceptionStatus::Delivered: return "delivered";
    case ReceptionStatus::LostBelowSensitivity: return "lost_below_sensitivity";
    case ReceptionStatus::LostCollision: return "lost_collision";
    }
    return "?";
}

void LinkGeometry::validate() const
{
    if (!(distance_m > 0.0) || !std::isfinite(distance_m)) {
        std::ostringstream os;
        os << "link distance must be positive, got " << distance_m;
        throw DomainError(os.str());
    }
    if (implant_depth_m < 0.0 || implant_depth_m > distance_m) {
        std::ostringstream os;
        os << "implant depth " << implant_depth_m << " m must lie in [0, distance=" << distance_m << "]";
        throw DomainError(os.str());
    }
}

void ChannelParams::validate() const
{
    if (!(exp_onbody > 0.0) || !(exp_inbody > 0.0))
        throw ConfigError("[channel] path-loss exponents must be > 0");
    if (!(d0_m > 0.0))
        throw ConfigError("[channel] d0_m must be > 0");
    if (!std::isfinite(cca_threshold_dbm) || !std::isfinite(rx_sensitivity_dbm) || !std::isfinite(noise_floor_dbm)
        || !std::isfinite(pl0_db) || !std::isfinite(tissue_loss_db))
        throw ConfigError("[channel] thresholds and losses must be finite");
    if (capture_margin_db < 0.0)
        throw ConfigError("[channel] capture_margin_db must be >= 0");
}

double dbm_to_mw(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

double mw_to_dbm(double mw)
{
    return 10.0 * std::log10(mw);
}

double path_loss_db(const LinkGeometry& geom, const ChannelParams& params)
{
    geom.validate();
    double pl = params.pl0_db + 10.0 * params.exp_onbody * std::log10(geom.distance_m / params.d0_m);
    const int inbody_ends = (geom.tx_placement == Placement::InBody ? 1 : 0)
                            + (geom.rx_placement == Placement::InBody ? 1 : 0);
    if (inbody_ends > 0) {
        const double tissue = params.tissue_loss_db
                              + 10.0 * params.exp_inbody * std::log10(1.0 + geom.implant_depth_m / params.d0_m);
        pl += inbody_ends * tissue;
    }
    return pl;
}

CcaResult assess_channel(EntityId listener, std::span<const ActiveTransmission> active,
                         const ChannelParams& params)
{
    double mw = dbm_to_mw(params.noise_floor_dbm);
    for (const auto& t : active) {
        if (t.tx == listener)
            continue;
        mw += dbm_to_mw(received_power_dbm(t.tx_power_dbm, t.geometry, params));
    }
    const double sensed = mw_to_dbm(mw);
    return CcaResult{sensed >= params.cca_threshold_dbm ? CcaVerdict::Busy : CcaVerdict::Idle, sensed};
}

ReceptionOutcome resolve_reception(EntityId receiver, const Transmission& intended,
                                   std::span<const Transmission> overlapping, const ChannelParams& params)
{
    const double rx = received_power_dbm(intended.tx_power_dbm, intended.geometry, params);
    if (rx < params.rx_sensitivity_dbm)
        return {ReceptionStatus::LostBelowSensitivity, rx};
    for (const auto& o : overlapping) {
        if (&o == &intended || (o.tx == intended.tx && o.start == intended.start) || !o.overlaps(intended))
            continue;
        if (o.tx == receiver)
            return {ReceptionStatus::LostCollision, rx};
        const double interference = received_power_dbm(o.tx_power_dbm, o.geometry, params);
        if (interference >= rx - params.capture_margin_db)
            return {ReceptionStatus::LostCollision, rx};
    }
    return {ReceptionStatus::Delivered, rx};
}

}  // namespace bsn
