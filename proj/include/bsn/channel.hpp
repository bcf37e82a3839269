#pragma once

#include "bsn/types.hpp"

#include <span>

namespace bsn {

enum class Placement : std::uint8_t { InBody, OnBody };

std::string_view to_string(Placement p);

/// Geometry of one tx->rx link. `implant_depth_m` applies to every in-body endpoint.
struct LinkGeometry {
    double distance_m = 1.0;
    Placement tx_placement = Placement::OnBody;
    Placement rx_placement = Placement::OnBody;
    double implant_depth_m = 0.0;

    void validate() const;
};

/// Log-distance propagation with an extra term for each endpoint below the body surface.
struct ChannelParams {
    double pl0_db = 40.0;
    double d0_m = 0.1;
    double exp_onbody = 3.5;
    double exp_inbody = 6.0;
    double tissue_loss_db = 35.0;
    double cca_threshold_dbm = -85.0;
    double rx_sensitivity_dbm = -95.0;
    double noise_floor_dbm = -100.0;
    double capture_margin_db = 10.0;

    void validate() const;
    bool operator==(const ChannelParams&) const = default;
};

double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// PL = pl0 + 10 n_on log10(d/d0) + sum over in-body endpoints of
///      (tissue_loss + 10 n_in log10(1 + depth/d0)).
/// Throws DomainError for a non-positive distance.
double path_loss_db(const LinkGeometry& geom, const ChannelParams& params);

inline double received_power_dbm(double tx_power_dbm, const LinkGeometry& geom, const ChannelParams& params)
{
    return tx_power_dbm - path_loss_db(geom, params);
}

enum class CcaVerdict : std::uint8_t { Busy, Idle };

struct CcaResult {
    CcaVerdict verdict;
    double sensed_power_dbm;
};

/// A transmission currently on the air, with its geometry toward the listener.
struct ActiveTransmission {
    EntityId tx;
    double tx_power_dbm;
    LinkGeometry geometry;
};

/// Energy detection: noise floor plus every active signal, summed in milliwatts. The
/// listener's own transmission is ignored.
CcaResult assess_channel(EntityId listener, std::span<const ActiveTransmission> active,
                         const ChannelParams& params);

/// A transmission with its time extent, as seen by one receiver.
struct Transmission {
    EntityId tx;
    double tx_power_dbm;
    LinkGeometry geometry;  // toward the receiver
    SimTime start;
    SimTime end;            // exclusive

    bool overlaps(const Transmission& o) const { return start < o.end && o.start < end; }
};

enum class ReceptionStatus : std::uint8_t { Delivered, LostBelowSensitivity, LostCollision };

std::string_view to_string(ReceptionStatus s);

struct ReceptionOutcome {
    ReceptionStatus status;
    double rx_power_dbm;
};

/// Reception with a capture margin: any time-overlapping interferer received within
/// `capture_margin_db` of the intended signal destroys it. A transmission by the
/// receiver itself (half duplex) always does.
ReceptionOutcome resolve_reception(EntityId receiver, const Transmission& intended,
                                   std::span<const Transmission> overlapping, const ChannelParams& params);

}  // namespace bsn
