#include "bsn/scenario.hpp"

#include "bsn/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bsn {

std::string_view to_string(MacKind m)
{
    switch (m) {
    case MacKind::Ptdma: return "ptdma";
    case MacKind::Csma: return "csma";
    case MacKind::CsmaPrio: return "csma-prio";
    case MacKind::Smac: return "smac";
    case MacKind::Pbtdma: return "pbtdma";
    case MacKind::Beacon154: return "beacon154";
    }
    return "?";
}

MacKind parse_mac(std::string_view name)
{
    for (auto m : {MacKind::Ptdma, MacKind::Csma, MacKind::CsmaPrio, MacKind::Smac, MacKind::Pbtdma,
                   MacKind::Beacon154})
        if (to_string(m) == name)
            return m;
    throw ConfigError("unknown MAC '" + std::string(name) + "' (ptdma|csma|csma-prio|smac|pbtdma|beacon154)");
}

ScenarioError::ScenarioError(std::size_t line, std::string section, const std::string& message)
    : ConfigError(line ? "line " + std::to_string(line) + ": " + message : message),
      line_(line),
      section_(std::move(section))
{
}

SimTime PhyParams::airtime(std::uint32_t bits) const
{
    return static_cast<SimTime>(std::ceil(static_cast<double>(bits) * 1e6 / bitrate_bps));
}

std::optional<EntityId> Scenario::find_node(std::string_view id) const
{
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id)
            return static_cast<EntityId>(i);
    return std::nullopt;
}

WakeupTable Scenario::wakeup_table() const
{
    std::vector<EntityId> order(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i)
        order[i] = static_cast<EntityId>(i);
    std::stable_sort(order.begin(), order.end(), [&](EntityId a, EntityId b) {
        return nodes[a].slot.value_or(a) < nodes[b].slot.value_or(b);
    });
    WakeupTable t;
    for (EntityId i : order) {
        if (!nodes[i].pattern)
            throw ConfigError("node '" + nodes[i].id + "' has no wake-up pattern");
        t.add(i, *nodes[i].pattern);
    }
    return t;
}

TdmaParams Scenario::tdma_params() const
{
    TdmaParams p;
    p.slot_duration = ptdma.slot_duration;
    p.guard_time = ptdma.guard_time;
    p.slots_per_frame = ptdma.slots_per_frame.value_or(static_cast<std::uint32_t>(std::max<std::size_t>(nodes.size(), 1)));
    return p;
}

namespace {

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view s, char sep)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

struct Value {
    std::string text;
    std::size_t line;
};

struct Section {
    std::string name;
    std::size_t line;
    std::map<std::string, Value> keys;
    std::set<std::string> used;
};

/// Typed access to one section's keys with line-accurate errors.
class Reader {
public:
    explicit Reader(Section& s) : s_(s) {}

    [[noreturn]] void fail(std::size_t line, const std::string& msg) const
    {
        throw ScenarioError(line, s_.name, "[" + s_.name + "] " + msg);
    }

    const Value* find(const std::string& key)
    {
        auto it = s_.keys.find(key);
        if (it == s_.keys.end())
            return nullptr;
        s_.used.insert(key);
        return &it->second;
    }

    template <typename T>
    bool get_uint(const std::string& key, T& out)
    {
        const Value* v = find(key);
        if (!v)
            return false;
        std::uint64_t x = 0;
        auto [p, ec] = std::from_chars(v->text.data(), v->text.data() + v->text.size(), x);
        if (ec != std::errc{} || p != v->text.data() + v->text.size())
            fail(v->line, key + " must be a non-negative integer, got '" + v->text + "'");
        if (x > std::numeric_limits<T>::max())
            fail(v->line, key + " is out of range");
        out = static_cast<T>(x);
        return true;
    }

    bool get_double(const std::string& key, double& out)
    {
        const Value* v = find(key);
        if (!v)
            return false;
        out = parse_double(*v, key);
        return true;
    }

    double parse_double(const Value& v, const std::string& key) const
    {
        double x = 0.0;
        auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), x);
        if (ec != std::errc{} || p != v.text.data() + v.text.size() || !std::isfinite(x))
            fail(v.line, key + " must be a finite number, got '" + v.text + "'");
        return x;
    }

    bool get_string(const std::string& key, std::string& out)
    {
        const Value* v = find(key);
        if (!v)
            return false;
        out = v->text;
        return true;
    }

    bool get_bool(const std::string& key, bool& out)
    {
        const Value* v = find(key);
        if (!v)
            return false;
        if (v->text == "true" || v->text == "1" || v->text == "yes")
            out = true;
        else if (v->text == "false" || v->text == "0" || v->text == "no")
            out = false;
        else
            fail(v->line, key + " must be true or false, got '" + v->text + "'");
        return true;
    }

    void check_unused() const
    {
        for (const auto& [k, v] : s_.keys)
            if (!s_.used.count(k))
                fail(v.line, "unknown key '" + k + "'");
    }

    std::size_t line() const { return s_.line; }

private:
    Section& s_;
};

std::vector<Section> lex(std::string_view text)
{
    std::vector<Section> sections;
    std::size_t lineno = 0;
    std::size_t start = 0;
    bool any_content = false;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view raw = text.substr(start, end - start);
        ++lineno;
        start = end + 1;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
        if (line.empty()) {
            if (end == text.size())
                break;
            continue;
        }
        any_content = true;
        if (line.front() == '[') {
            if (line.back() != ']' || line.size() < 3)
                throw ScenarioError(lineno, "", "syntax error: malformed section header '" + line + "'");
            std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
            const bool ok = !name.empty() && std::all_of(name.begin(), name.end(), [](char c) {
                return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
            });
            if (!ok)
                throw ScenarioError(lineno, "", "syntax error: invalid section name '" + name + "'");
            for (const auto& s : sections)
                if (s.name == name)
                    throw ScenarioError(lineno, name, "duplicate section [" + name + "]");
            sections.push_back(Section{name, lineno, {}, {}});
        } else {
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ScenarioError(lineno, "", "syntax error: expected 'key = value' or '[section]', got '" + line + "'");
            if (sections.empty())
                throw ScenarioError(lineno, "", "syntax error: key outside of any section");
            std::string key = trim(std::string_view(line).substr(0, eq));
            std::string value = trim(std::string_view(line).substr(eq + 1));
            if (key.empty())
                throw ScenarioError(lineno, sections.back().name, "syntax error: empty key");
            if (!sections.back().keys.emplace(key, Value{value, lineno}).second)
                throw ScenarioError(lineno, sections.back().name, "duplicate key '" + key + "'");
        }
        if (end == text.size())
            break;
    }
    if (!any_content)
        throw ScenarioError(1, "", "syntax error: empty scenario");
    return sections;
}

std::vector<std::uint64_t> parse_seeds(Reader& r, const Value& v)
{
    std::vector<std::uint64_t> out;
    auto num = [&](const std::string& s) {
        std::uint64_t x = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
        if (ec != std::errc{} || p != s.data() + s.size())
            r.fail(v.line, "seeds entry '" + s + "' is not an integer");
        return x;
    };
    for (const auto& item : split(v.text, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(num(item));
            continue;
        }
        const auto lo = num(trim(std::string_view(item).substr(0, dots)));
        const auto hi = num(trim(std::string_view(item).substr(dots + 2)));
        if (hi < lo)
            r.fail(v.line, "seed range '" + item + "' is empty");
        for (auto s = lo; s <= hi; ++s)
            out.push_back(s);
    }
    if (out.empty())
        r.fail(v.line, "seeds must not be empty");
    return out;
}

template <typename Fn>
void wrap(Reader& r, std::size_t line, Fn&& fn)
{
    try {
        fn();
    } catch (const ScenarioError&) {
        throw;
    } catch (const ConfigError& e) {
        r.fail(line, e.what());
    }
}

void read_node(Section& sec, NodeConfig& n)
{
    Reader r(sec);
    std::string s;
    if (r.get_string("placement", s)) {
        if (s == "inbody")
            n.placement = Placement::InBody;
        else if (s == "onbody")
            n.placement = Placement::OnBody;
        else
            r.fail(r.find("placement")->line, "placement must be inbody or onbody");
    }
    r.get_double("distance_m", n.distance_m);
    r.get_double("depth_m", n.depth_m);
    r.get_double("bearing_deg", n.bearing_deg);
    if (const Value* v = r.find("pattern"))
        wrap(r, v->line, [&] { n.pattern = WakeupPattern::parse(v->text); });
    std::uint32_t slot = 0;
    if (r.get_uint("slot", slot))
        n.slot = slot;
    r.get_uint("wakeup_channel", n.wakeup_channel);
    if (const Value* v = r.find("class")) {
        if (v->text == "critical")
            n.priority = Priority::Critical;
        else if (v->text == "noncritical")
            n.priority = Priority::NonCritical;
        else
            r.fail(v->line, "class must be critical or noncritical");
    }
    if (const Value* v = r.find("rate"))
        wrap(r, v->line, [&] { n.rate = Rate::parse(v->text); });
    r.get_double("tx_power_dbm", n.tx_power_dbm);
    r.get_bool("gts", n.gts);
    r.check_unused();

    if (!(n.distance_m > 0.0))
        r.fail(r.line(), "distance_m must be > 0");
    if (n.depth_m < 0.0 || (n.placement == Placement::OnBody && n.depth_m != 0.0))
        r.fail(r.line(), "depth_m must be >= 0 and is only allowed for inbody nodes");
    if (n.placement == Placement::InBody && n.depth_m > n.distance_m)
        r.fail(r.line(), "depth_m must not exceed distance_m");
}

}  // namespace

void validate_for(const Scenario& s, MacKind mac)
{
    auto fail = [](const std::string& section, const std::string& msg) {
        throw ScenarioError(0, section, "[" + section + "] " + msg);
    };
    auto check = [&](const std::string& section, auto&& fn) {
        try {
            fn();
        } catch (const ScenarioError&) {
            throw;
        } catch (const ConfigError& e) {
            fail(section, e.what());
        }
    };

    if (s.nodes.empty())
        fail("scenario", "at least one [node.<id>] section is required");
    check("channel", [&] { s.channel.validate(); });
    check("power", [&] { s.power.validate(); });
    check("csma", [&] { s.csma.validate(); });
    check("superframe", [&] { s.superframe.validate(); });
    check("smac", [&] { s.smac.validate(); });
    check("pbtdma", [&] { s.pbtdma.validate(); });
    check("phy", [&] { validate_data_rate(s.phy.bitrate_bps); });
    if (s.traffic.payload_bits == 0)
        fail("traffic", "payload_bits must be > 0");
    if (s.traffic.queue_capacity == 0)
        fail("traffic", "queue_capacity must be >= 1");
    if (s.wakeup.signal_duration == 0)
        fail("wakeup", "signal_us must be > 0");

    std::set<std::string> ids;
    std::optional<std::size_t> length;
    std::size_t with_pattern = 0, with_slot = 0;
    for (const auto& n : s.nodes) {
        if (n.id == kCoordinatorId)
            fail("node." + n.id, "'coordinator' is reserved for the hub");
        if (!ids.insert(n.id).second)
            fail("node." + n.id, "duplicate node id");
        if (n.pattern) {
            ++with_pattern;
            if (length && *length != n.pattern->length())
                fail("node." + n.id, "pattern lengths must be equal across nodes");
            length = n.pattern->length();
        }
        if (n.slot)
            ++with_slot;
        const Rate rate = n.rate.value_or(s.traffic.rate);
        if (rate.unit == Rate::Unit::PerActiveFrame && rate.value > 0.0 && !n.pattern)
            fail("node." + n.id, "per-frame rate requires a wake-up pattern");
    }
    if (with_slot != 0) {
        if (with_slot != s.nodes.size())
            fail("ptdma", "either every node or no node must set 'slot'");
        std::vector<std::uint32_t> slots;
        for (const auto& n : s.nodes)
            slots.push_back(*n.slot);
        std::sort(slots.begin(), slots.end());
        for (std::size_t i = 0; i < slots.size(); ++i)
            if (slots[i] != i)
                fail("ptdma", "slot indices must be unique and contiguous from 0");
    }
    if (s.emergency) {
        check("emergency", [&] { s.emergency->config.validate(); });
        for (const auto& id : s.emergency->nodes)
            if (!s.find_node(id))
                fail("emergency", "unknown node '" + id + "'");
    }
    for (const auto& q : s.ondemand.requests) {
        if (!s.find_node(q.node))
            fail("ondemand", "request targets unknown node '" + q.node + "'");
        if (q.kind == SessionKind::NonContinuous && q.param < 1)
            fail("ondemand", "non-continuous request needs a packet count >= 1");
        if (q.kind == SessionKind::Continuous && q.param <= q.at)
            fail("ondemand", "continuous request must stop after it starts");
    }
    for (const auto& u : s.ptdma.updates) {
        if (!s.find_node(u.node))
            fail("ptdma", "pattern update for unknown node '" + u.node + "'");
        if (!length || u.pattern.length() != *length)
            fail("ptdma", "pattern update for '" + u.node + "' has a length mismatch");
    }

    if (mac == MacKind::Ptdma) {
        if (with_pattern != s.nodes.size())
            fail("ptdma", "every node needs a wake-up pattern");
        check("ptdma", [&] {
            const TdmaParams p = s.tdma_params();
            p.validate();
            build_schedule(s.wakeup_table(), p);
            const SimTime exchange = s.phy.airtime(s.traffic.payload_bits) + s.phy.turnaround
                                     + std::max(s.phy.airtime(s.phy.ack_bits), s.csma.ack_timeout);
            if (exchange > p.slot_duration - p.guard_time)
                throw ConfigError("a data exchange of " + std::to_string(exchange)
                                  + " us does not fit the usable slot of "
                                  + std::to_string(p.slot_duration - p.guard_time) + " us");
        });
    }
}

Scenario parse_scenario(std::string_view text)
{
    auto sections = lex(text);
    Scenario s;
    bool have_scenario = false, have_mac = false, have_duration = false;

    for (auto& sec : sections) {
        Reader r(sec);
        const std::string& name = sec.name;
        if (name == "scenario") {
            have_scenario = true;
            r.get_string("name", s.name);
            if (const Value* v = r.find("mac")) {
                wrap(r, v->line, [&] { s.mac = parse_mac(v->text); });
                have_mac = true;
            }
            have_duration = r.get_uint("duration_us", s.duration);
            if (const Value* v = r.find("seeds"))
                s.seeds = parse_seeds(r, *v);
            r.get_uint("event_cap", s.event_cap);
        } else if (name == "channel") {
            auto& c = s.channel;
            r.get_double("pl0_db", c.pl0_db);
            r.get_double("d0_m", c.d0_m);
            r.get_double("exp_onbody", c.exp_onbody);
            r.get_double("exp_inbody", c.exp_inbody);
            r.get_double("tissue_loss_db", c.tissue_loss_db);
            r.get_double("cca_threshold_dbm", c.cca_threshold_dbm);
            r.get_double("rx_sensitivity_dbm", c.rx_sensitivity_dbm);
            r.get_double("noise_floor_dbm", c.noise_floor_dbm);
            r.get_double("capture_margin_db", c.capture_margin_db);
        } else if (name == "phy") {
            r.get_double("bitrate_bps", s.phy.bitrate_bps);
            r.get_uint("turnaround_us", s.phy.turnaround);
            r.get_uint("ack_bits", s.phy.ack_bits);
        } else if (name == "power") {
            auto& p = s.power;
            r.get_double("transmit_mw", p.transmit_mw);
            r.get_double("receive_mw", p.receive_mw);
            r.get_double("cca_mw", p.cca_mw);
            r.get_double("idle_listen_mw", p.idle_listen_mw);
            r.get_double("wakeup_listen_mw", p.wakeup_listen_mw);
            r.get_double("sleep_mw", p.sleep_mw);
        } else if (name == "ptdma") {
            r.get_uint("slot_duration_us", s.ptdma.slot_duration);
            r.get_uint("guard_us", s.ptdma.guard_time);
            std::uint32_t spf = 0;
            if (r.get_uint("slots_per_frame", spf))
                s.ptdma.slots_per_frame = spf;
            if (const Value* v = r.find("updates")) {
                for (const auto& item : split(v->text, ',')) {
                    auto parts = split(item, ':');
                    if (parts.size() != 3)
                        r.fail(v->line, "update '" + item + "' must be time_us:node:pattern");
                    PatternUpdate u{0, parts[1], WakeupPattern::zeros(1)};
                    wrap(r, v->line, [&] {
                        u.at = static_cast<SimTime>(std::stoull(parts[0]));
                        u.pattern = WakeupPattern::parse(parts[2]);
                    });
                    s.ptdma.updates.push_back(u);
                }
            }
        } else if (name == "csma") {
            auto& c = s.csma;
            r.get_uint("w0_critical", c.w0_critical);
            r.get_uint("w0_noncritical", c.w0_noncritical);
            r.get_uint("w0_standard", c.w0_standard);
            r.get_uint("max_doublings", c.max_doublings);
            r.get_uint("max_attempts", c.max_attempts);
            r.get_uint("backoff_slot_us", c.backoff_slot);
            r.get_uint("cca_us", c.cca_duration);
            r.get_uint("max_retries", c.max_retries);
            r.get_uint("ack_timeout_us", c.ack_timeout);
        } else if (name == "superframe") {
            auto& f = s.superframe;
            r.get_uint("beacon_interval_us", f.beacon_interval);
            r.get_uint("beacon_us", f.beacon_duration);
            r.get_uint("cap_us", f.cap_duration);
            r.get_uint("gts_slots", f.gts_slot_count);
            r.get_uint("gts_slot_us", f.gts_slot_duration);
            r.get_uint("gts_expiry_frames", f.gts_expiry_frames);
        } else if (name == "smac") {
            r.get_uint("listen_us", s.smac.listen_duration);
            r.get_uint("sleep_us", s.smac.sleep_duration);
        } else if (name == "pbtdma") {
            r.get_uint("slot_us", s.pbtdma.slot_duration);
            r.get_uint("preamble_us", s.pbtdma.preamble_duration);
        } else if (name == "wakeup") {
            if (const Value* v = r.find("mode")) {
                if (v->text == "broadcast")
                    s.wakeup.mode = WakeupMode::Broadcast;
                else if (v->text == "addressed")
                    s.wakeup.mode = WakeupMode::FrequencyAddressed;
                else
                    r.fail(v->line, "mode must be broadcast or addressed");
            }
            r.get_uint("signal_us", s.wakeup.signal_duration);
            r.get_uint("coordinator_channel", s.wakeup.coordinator_channel);
            r.get_uint("false_wake_us", s.wakeup.false_wake_cost);
        } else if (name == "emergency") {
            EmergencySection e;
            if (const Value* v = r.find("nodes"))
                for (const auto& id : split(v->text, ','))
                    if (!id.empty())
                        e.nodes.push_back(id);
            auto& c = e.config;
            r.get_double("threshold", c.threshold);
            r.get_double("start", c.start);
            r.get_double("drift", c.drift);
            r.get_double("step_sigma", c.step_sigma);
            r.get_double("floor", c.floor);
            r.get_double("ceiling", c.ceiling);
            r.get_uint("sample_us", c.sample_period);
            r.get_uint("deadline_us", c.deadline);
            s.emergency = e;
        } else if (name == "traffic") {
            r.get_uint("payload_bits", s.traffic.payload_bits);
            r.get_uint("queue_capacity", s.traffic.queue_capacity);
            if (const Value* v = r.find("arrivals")) {
                if (v->text == "pinned")
                    s.traffic.arrivals = ArrivalMode::Pinned;
                else if (v->text == "free")
                    s.traffic.arrivals = ArrivalMode::Free;
                else
                    r.fail(v->line, "arrivals must be pinned or free");
            }
            if (const Value* v = r.find("rate"))
                wrap(r, v->line, [&] { s.traffic.rate = Rate::parse(v->text); });
        } else if (name == "ondemand") {
            SimTime interval = 0;
            if (r.get_uint("stream_interval_us", interval))
                s.ondemand.stream_interval = interval;
            if (const Value* v = r.find("requests")) {
                for (const auto& item : split(v->text, ',')) {
                    if (item.empty())
                        continue;
                    auto parts = split(item, ':');
                    if (parts.size() != 4)
                        r.fail(v->line, "request '" + item + "' must be time_us:node:kind:param");
                    OnDemandRequest q{};
                    q.node = parts[1];
                    if (parts[2] == "continuous")
                        q.kind = SessionKind::Continuous;
                    else if (parts[2] == "noncontinuous")
                        q.kind = SessionKind::NonContinuous;
                    else
                        r.fail(v->line, "request kind must be continuous or noncontinuous");
                    try {
                        q.at = std::stoull(parts[0]);
                        q.param = std::stoull(parts[3]);
                    } catch (const std::exception&) {
                        r.fail(v->line, "request '" + item + "' has a non-integer field");
                    }
                    s.ondemand.requests.push_back(q);
                }
            }
        } else if (name.rfind("node.", 0) == 0) {
            NodeConfig n;
            n.id = name.substr(5);
            if (n.id.empty())
                r.fail(sec.line, "node section needs an id: [node.<id>]");
            read_node(sec, n);
            s.nodes.push_back(std::move(n));
        } else {
            throw ScenarioError(sec.line, name, "unknown section [" + name + "]");
        }
        r.check_unused();
    }

    if (!have_scenario)
        throw ScenarioError(0, "scenario", "[scenario] section is required");
    if (!have_mac)
        throw ScenarioError(0, "scenario", "[scenario] mac is required");
    if (!have_duration)
        throw ScenarioError(0, "scenario", "[scenario] duration_us is required");
    validate_for(s, s.mac);
    return s;
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open scenario file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string to_text(const Scenario& s)
{
    std::ostringstream o;
    auto d = [](double v) { return format_double(v); };
    o << "[scenario]\n";
    o << "name = " << s.name << '\n';
    o << "mac = " << to_string(s.mac) << '\n';
    o << "duration_us = " << s.duration << '\n';
    o << "seeds = ";
    for (std::size_t i = 0; i < s.seeds.size(); ++i)
        o << (i ? "," : "") << s.seeds[i];
    o << '\n';
    o << "event_cap = " << s.event_cap << "\n\n";

    const auto& c = s.channel;
    o << "[channel]\n"
      << "pl0_db = " << d(c.pl0_db) << "\nd0_m = " << d(c.d0_m) << "\nexp_onbody = " << d(c.exp_onbody)
      << "\nexp_inbody = " << d(c.exp_inbody) << "\ntissue_loss_db = " << d(c.tissue_loss_db)
      << "\ncca_threshold_dbm = " << d(c.cca_threshold_dbm) << "\nrx_sensitivity_dbm = " << d(c.rx_sensitivity_dbm)
      << "\nnoise_floor_dbm = " << d(c.noise_floor_dbm) << "\ncapture_margin_db = " << d(c.capture_margin_db)
      << "\n\n";

    o << "[phy]\nbitrate_bps = " << d(s.phy.bitrate_bps) << "\nturnaround_us = " << s.phy.turnaround
      << "\nack_bits = " << s.phy.ack_bits << "\n\n";

    const auto& p = s.power;
    o << "[power]\ntransmit_mw = " << d(p.transmit_mw) << "\nreceive_mw = " << d(p.receive_mw)
      << "\ncca_mw = " << d(p.cca_mw) << "\nidle_listen_mw = " << d(p.idle_listen_mw)
      << "\nwakeup_listen_mw = " << d(p.wakeup_listen_mw) << "\nsleep_mw = " << d(p.sleep_mw) << "\n\n";

    o << "[ptdma]\nslot_duration_us = " << s.ptdma.slot_duration << "\nguard_us = " << s.ptdma.guard_time << '\n';
    if (s.ptdma.slots_per_frame)
        o << "slots_per_frame = " << *s.ptdma.slots_per_frame << '\n';
    if (!s.ptdma.updates.empty()) {
        o << "updates = ";
        for (std::size_t i = 0; i < s.ptdma.updates.size(); ++i) {
            const auto& u = s.ptdma.updates[i];
            o << (i ? ", " : "") << u.at << ':' << u.node << ':' << u.pattern.to_string();
        }
        o << '\n';
    }
    o << '\n';

    const auto& b = s.csma;
    o << "[csma]\nw0_critical = " << b.w0_critical << "\nw0_noncritical = " << b.w0_noncritical
      << "\nw0_standard = " << b.w0_standard << "\nmax_doublings = " << b.max_doublings
      << "\nmax_attempts = " << b.max_attempts << "\nbackoff_slot_us = " << b.backoff_slot
      << "\ncca_us = " << b.cca_duration << "\nmax_retries = " << b.max_retries
      << "\nack_timeout_us = " << b.ack_timeout << "\n\n";

    const auto& f = s.superframe;
    o << "[superframe]\nbeacon_interval_us = " << f.beacon_interval << "\nbeacon_us = " << f.beacon_duration
      << "\ncap_us = " << f.cap_duration << "\ngts_slots = " << f.gts_slot_count
      << "\ngts_slot_us = " << f.gts_slot_duration << "\ngts_expiry_frames = " << f.gts_expiry_frames << "\n\n";

    o << "[smac]\nlisten_us = " << s.smac.listen_duration << "\nsleep_us = " << s.smac.sleep_duration << "\n\n";
    o << "[pbtdma]\nslot_us = " << s.pbtdma.slot_duration << "\npreamble_us = " << s.pbtdma.preamble_duration
      << "\n\n";

    o << "[wakeup]\nmode = " << to_string(s.wakeup.mode) << "\nsignal_us = " << s.wakeup.signal_duration
      << "\ncoordinator_channel = " << s.wakeup.coordinator_channel << "\nfalse_wake_us = "
      << s.wakeup.false_wake_cost << "\n\n";

    if (s.emergency) {
        const auto& e = s.emergency->config;
        o << "[emergency]\nnodes = ";
        for (std::size_t i = 0; i < s.emergency->nodes.size(); ++i)
            o << (i ? "," : "") << s.emergency->nodes[i];
        o << "\nthreshold = " << d(e.threshold) << "\nstart = " << d(e.start) << "\ndrift = " << d(e.drift)
          << "\nstep_sigma = " << d(e.step_sigma) << "\nfloor = " << d(e.floor) << "\nceiling = " << d(e.ceiling)
          << "\nsample_us = " << e.sample_period << "\ndeadline_us = " << e.deadline << "\n\n";
    }

    o << "[traffic]\npayload_bits = " << s.traffic.payload_bits
      << "\narrivals = " << (s.traffic.arrivals == ArrivalMode::Pinned ? "pinned" : "free")
      << "\nqueue_capacity = " << s.traffic.queue_capacity << "\nrate = " << s.traffic.rate.to_string() << "\n\n";

    if (s.ondemand.stream_interval || !s.ondemand.requests.empty()) {
        o << "[ondemand]\n";
        if (s.ondemand.stream_interval)
            o << "stream_interval_us = " << *s.ondemand.stream_interval << '\n';
        if (!s.ondemand.requests.empty()) {
            o << "requests = ";
            for (std::size_t i = 0; i < s.ondemand.requests.size(); ++i) {
                const auto& q = s.ondemand.requests[i];
                o << (i ? ", " : "") << q.at << ':' << q.node << ':' << to_string(q.kind) << ':' << q.param;
            }
            o << '\n';
        }
        o << '\n';
    }

    for (const auto& n : s.nodes) {
        o << "[node." << n.id << "]\nplacement = " << to_string(n.placement) << "\ndistance_m = " << d(n.distance_m)
          << "\ndepth_m = " << d(n.depth_m) << "\nbearing_deg = " << d(n.bearing_deg) << '\n';
        if (n.pattern)
            o << "pattern = " << n.pattern->to_string() << '\n';
        if (n.slot)
            o << "slot = " << *n.slot << '\n';
        o << "wakeup_channel = " << n.wakeup_channel << "\nclass = " << to_string(n.priority) << '\n';
        if (n.rate)
            o << "rate = " << n.rate->to_string() << '\n';
        o << "tx_power_dbm = " << d(n.tx_power_dbm) << "\ngts = " << (n.gts ? "true" : "false") << "\n\n";
    }
    return o.str();
}

}  // namespace bsn
