#include "bsn/traffic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>
#include <sstream>

namespace bsn {

std::string_view to_string(TrafficClass c)
{
    switch (c) {
    case TrafficClass::Normal: return "normal";
    case TrafficClass::Emergency: return "emergency";
    case TrafficClass::OnDemandContinuous: return "ondemand_continuous";
    case TrafficClass::OnDemandNonContinuous: return "ondemand_noncontinuous";
    }
    return "?";
}

std::string_view to_string(DropReason r)
{
    switch (r) {
    case DropReason::QueueOverflow: return "overflow";
    case DropReason::AccessFailure: return "access";
    case DropReason::Collision: return "collision";
    case DropReason::LinkBudget: return "link";
    case DropReason::Unsent: return "unsent";
    }
    return "?";
}

TrafficClass classify(const PacketDescriptor& meta)
{
    switch (meta.origin) {
    case PacketOrigin::PeriodicRead: return TrafficClass::Normal;
    case PacketOrigin::ThresholdEvent: return TrafficClass::Emergency;
    case PacketOrigin::CoordinatorRequest:
        if (!meta.request_kind)
            throw ClassificationError("coordinator request without a request kind cannot be classified");
        return *meta.request_kind == SessionKind::Continuous ? TrafficClass::OnDemandContinuous
                                                             : TrafficClass::OnDemandNonContinuous;
    }
    std::ostringstream os;
    os << "unrecognized packet origin " << static_cast<int>(meta.origin);
    throw ClassificationError(os.str());
}

Rate Rate::parse(std::string_view text)
{
    const auto slash = text.find('/');
    if (slash == std::string_view::npos)
        throw ConfigError("rate '" + std::string(text) + "' must look like <value>/<unit>");
    const std::string_view num = text.substr(0, slash);
    const std::string_view unit = text.substr(slash + 1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (ec != std::errc{} || ptr != num.data() + num.size() || !std::isfinite(v) || v < 0.0)
        throw ConfigError("rate '" + std::string(text) + "' needs a non-negative number before '/'");
    if (unit == "frame")
        return Rate{v, Unit::PerActiveFrame};
    if (unit == "s")
        return Rate{v, Unit::PerSecond};
    if (unit == "min")
        return Rate{v / 60.0, Unit::PerSecond};
    if (unit == "hour")
        return Rate{v / 3600.0, Unit::PerSecond};
    if (unit == "day")
        return Rate{v / 86400.0, Unit::PerSecond};
    if (unit == "week")
        return Rate{v / 604800.0, Unit::PerSecond};
    throw ConfigError("rate '" + std::string(text) + "' has unknown unit (frame|s|min|hour|day|week)");
}

std::string Rate::to_string() const
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    std::string s(buf, ptr);
    return s + (unit == Unit::PerActiveFrame ? "/frame" : "/s");
}

namespace {

std::vector<SimTime> poisson_times(double per_second, SimTime horizon, Rng& rng)
{
    std::vector<SimTime> out;
    if (per_second <= 0.0)
        return out;
    std::exponential_distribution<double> gap(per_second / 1e6);
    double t = 0.0;
    while (true) {
        t += gap(rng);
        if (t >= static_cast<double>(horizon))
            break;
        out.push_back(static_cast<SimTime>(t));
    }
    return out;
}

}  // namespace

std::vector<SimTime> generate_normal(const Rate& rate, ArrivalMode mode, const WakeupPattern* pattern,
                                     const std::optional<FrameGrid>& grid, SimTime horizon, Rng& rng)
{
    std::vector<SimTime> out;
    if (rate.value <= 0.0 || horizon == 0)
        return out;
    if (rate.unit == Rate::Unit::PerActiveFrame && (!pattern || !grid))
        throw ConfigError("per-frame rates need a wake-up pattern and TDMA frame timing");

    if (rate.unit == Rate::Unit::PerActiveFrame && mode == ArrivalMode::Pinned) {
        const std::size_t L = pattern->length();
        const double whole = std::floor(rate.value);
        const double frac = rate.value - whole;
        std::bernoulli_distribution extra(frac);
        for (std::uint64_t f = 0;; ++f) {
            const SimTime frame_start = f * grid->frame_duration;
            if (frame_start >= horizon)
                break;
            if (!pattern->active(f % L))
                continue;
            auto n = static_cast<std::uint64_t>(whole) + (frac > 0.0 && extra(rng) ? 1 : 0);
            std::uniform_int_distribution<SimTime> place(frame_start, frame_start + grid->window_offset);
            for (std::uint64_t k = 0; k < n; ++k) {
                const SimTime t = place(rng);
                if (t < horizon)
                    out.push_back(t);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    double per_second = rate.value;
    if (rate.unit == Rate::Unit::PerActiveFrame) {
        const double active_fraction =
            static_cast<double>(pattern->active_count()) / static_cast<double>(pattern->length());
        per_second = rate.value * active_fraction * 1e6 / static_cast<double>(grid->frame_duration);
    }
    out = poisson_times(per_second, horizon, rng);

    if (mode == ArrivalMode::Pinned && pattern && grid && !pattern->all_zero()) {
        const std::size_t L = pattern->length();
        for (auto& t : out) {
            std::uint64_t f = t / grid->frame_duration;
            const SimTime offset = t % grid->frame_duration;
            if (pattern->active(f % L) && offset <= grid->window_offset)
                continue;
            do {
                ++f;
            } while (!pattern->active(f % L));
            t = f * grid->frame_duration;
        }
        out.erase(std::remove_if(out.begin(), out.end(), [&](SimTime t) { return t >= horizon; }), out.end());
        std::sort(out.begin(), out.end());
    }
    return out;
}

std::vector<Reading> generate_emergency(const EmergencyConfig& cfg, SimTime horizon, Rng& rng)
{
    std::vector<Reading> out;
    std::normal_distribution<double> step(0.0, 1.0);
    double v = cfg.start;
    for (SimTime t = cfg.sample_period; t < horizon; t += cfg.sample_period) {
        v = std::clamp(v + cfg.drift + cfg.step_sigma * step(rng), cfg.floor, cfg.ceiling);
        out.push_back(Reading{t, v});
    }
    return out;
}

void validate_data_rate(double bits_per_second)
{
    if (!(bits_per_second >= 10e3 && bits_per_second <= 10e6)) {
        std::ostringstream os;
        os << "data rate " << bits_per_second << " b/s is outside the 10 kb/s .. 10 Mb/s envelope";
        throw ConfigError(os.str());
    }
}

}  // namespace bsn
