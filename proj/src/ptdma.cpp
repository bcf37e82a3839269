#include "bsn/ptdma.hpp"

#include <algorithm>
#include <sstream>

namespace bsn {

WakeupPattern::WakeupPattern(std::vector<bool> bits) : bits_(std::move(bits))
{
    if (bits_.empty())
        throw ConfigError("wake-up pattern must have at least one bit");
}

WakeupPattern WakeupPattern::parse(std::string_view text)
{
    std::vector<bool> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            std::ostringstream os;
            os << "wake-up pattern '" << text << "' may contain only 0 and 1";
            throw ConfigError(os.str());
        }
        bits.push_back(c == '1');
    }
    return WakeupPattern(std::move(bits));
}

std::size_t WakeupPattern::active_count() const
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

std::string WakeupPattern::to_string() const
{
    std::string s;
    s.reserve(bits_.size());
    for (bool b : bits_)
        s.push_back(b ? '1' : '0');
    return s;
}

WakeupPattern WakeupPattern::operator|(const WakeupPattern& o) const
{
    if (o.length() != length()) {
        std::ostringstream os;
        os << "pattern length mismatch: " << length() << " vs " << o.length();
        throw ConfigError(os.str());
    }
    std::vector<bool> out(bits_.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = bits_[i] || o.bits_[i];
    return WakeupPattern(std::move(out));
}

void WakeupTable::add(EntityId node, WakeupPattern pattern)
{
    if (entries_.count(node)) {
        std::ostringstream os;
        os << "node " << node << " is already registered in the wake-up table";
        throw ConfigError(os.str());
    }
    if (!entries_.empty() && pattern.length() != length_) {
        std::ostringstream os;
        os << "pattern length mismatch: node " << node << " has length " << pattern.length()
           << " but the table uses " << length_;
        throw ConfigError(os.str());
    }
    length_ = pattern.length();
    const auto slot = static_cast<std::uint32_t>(entries_.size());
    entries_.emplace(node, Entry{std::move(pattern), slot});
    ++version_;
}

WakeupTable WakeupTable::update_pattern(EntityId node, const WakeupPattern& pattern) const
{
    auto it = entries_.find(node);
    if (it == entries_.end()) {
        std::ostringstream os;
        os << "unknown node " << node << " in pattern update";
        throw ConfigError(os.str());
    }
    if (pattern.length() != length_) {
        std::ostringstream os;
        os << "pattern length mismatch: update has length " << pattern.length() << " but the table uses "
           << length_;
        throw ConfigError(os.str());
    }
    WakeupTable out = *this;
    out.entries_.at(node).pattern = pattern;
    ++out.version_;
    return out;
}

const WakeupTable::Entry& WakeupTable::at(EntityId node) const
{
    auto it = entries_.find(node);
    if (it == entries_.end()) {
        std::ostringstream os;
        os << "unknown node " << node;
        throw ConfigError(os.str());
    }
    return it->second;
}

WakeupPattern derive_coordinator_pattern(const WakeupTable& table)
{
    if (table.empty())
        throw ConfigError("cannot derive a coordinator pattern from an empty wake-up table");
    auto it = table.entries().begin();
    WakeupPattern acc = it->second.pattern;
    for (++it; it != table.entries().end(); ++it)
        acc = acc | it->second.pattern;
    return acc;
}

void TdmaParams::validate() const
{
    if (slot_duration == 0 || guard_time >= slot_duration)
        throw ConfigError("[ptdma] requires slot_duration_us > guard_us >= 0");
    if (slots_per_frame == 0)
        throw ConfigError("[ptdma] slots_per_frame must be >= 1");
}

std::optional<TdmaWindow> TdmaSchedule::window_at(EntityId node, SimTime t) const
{
    auto it = windows.find(node);
    if (it == windows.end() || length == 0)
        return std::nullopt;
    const SimTime hp = hyperperiod();
    const SimTime base = t - t % hp;
    const SimTime rel = t % hp;
    for (const auto& w : it->second) {
        if (rel >= w.start && rel < w.end) {
            TdmaWindow abs = w;
            abs.start += base;
            abs.end += base;
            return abs;
        }
    }
    return std::nullopt;
}

std::size_t TdmaSchedule::window_count() const
{
    std::size_t n = 0;
    for (const auto& [node, ws] : windows)
        n += ws.size();
    return n;
}

TdmaSchedule build_schedule(const WakeupTable& table, const TdmaParams& params)
{
    params.validate();
    std::vector<EntityId> overflow;
    for (const auto& [node, entry] : table.entries())
        if (entry.slot >= params.slots_per_frame)
            overflow.push_back(node);
    if (!overflow.empty()) {
        std::ostringstream os;
        os << "TDMA capacity exceeded: " << table.size() << " nodes but " << params.slots_per_frame
           << " slots per frame; overflow nodes:";
        for (auto n : overflow)
            os << ' ' << n;
        throw CapacityError(os.str());
    }

    TdmaSchedule s;
    s.frame_duration = params.frame_duration();
    s.slot_duration = params.slot_duration;
    s.slots_per_frame = params.slots_per_frame;
    s.length = static_cast<std::uint32_t>(table.pattern_length());
    if (table.empty())
        return s;

    const WakeupPattern coord = derive_coordinator_pattern(table);
    s.coordinator_active_frames = coord.bits();
    for (const auto& [node, entry] : table.entries()) {
        auto& list = s.windows[node];
        for (std::uint32_t f = 0; f < s.length; ++f) {
            if (!entry.pattern.active(f))
                continue;
            const SimTime start = f * s.frame_duration + entry.slot * params.slot_duration;
            list.push_back(TdmaWindow{node, f, entry.slot, start, start + params.slot_duration - params.guard_time});
        }
    }
    return s;
}

MacAction step(EntityId node, SimTime t, const TdmaSchedule& schedule, std::size_t queued)
{
    if (queued > 0 && schedule.window_at(node, t))
        return MacAction::Transmit;
    return MacAction::Sleep;
}

MacAction coordinator_step(SimTime t, const TdmaSchedule& schedule)
{
    if (schedule.length == 0)
        return MacAction::Sleep;
    return schedule.coordinator_active_at(t) ? MacAction::Receive : MacAction::Sleep;
}

}  // namespace bsn
