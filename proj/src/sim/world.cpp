#include "sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bsn::sim {

namespace {

constexpr SimTime kMediumHorizon = seconds(2);
constexpr double kMinDistance = 0.01;

bool asleep(RadioState s) { return s == RadioState::Sleep || s == RadioState::WakeupListen; }

}  // namespace

void Mac::on_emergency(EntityId node, PacketId pkt)
{
    w_.enqueue_front(node, pkt);
    on_enqueue(node);
}

World::World(const Scenario& scenario, std::uint64_t seed, const RunOptions& options)
    : engine(seed, scenario.event_cap),
      sc(scenario),
      opts(options),
      n(scenario.nodes.size()),
      coord(static_cast<EntityId>(scenario.nodes.size())),
      ledger(scenario.nodes.size() + 1, scenario.power, RadioState::Sleep),
      queues(n),
      in_flight(n),
      retries(n, 0),
      sessions(n),
      detectors_(n)
{
    if (opts.trace)
        engine.set_trace(opts.trace);
}

World::~World() = default;

SimTime World::exchange_span() const
{
    const SimTime ack = sc.phy.turnaround + sc.phy.airtime(sc.phy.ack_bits);
    return data_airtime() + std::max(ack, sc.csma.ack_timeout);
}

void World::set_state(EntityId e, RadioState s)
{
    if (e == coord) {
        const bool was = !asleep(ledger.state(e));
        const bool will = !asleep(s);
        if (!was && will)
            coord_awake_since_ = now();
        else if (!will)
            coord_awake_since_ = kTimeMax;
    }
    if (ledger.state(e) != s)
        ledger.accrue_state(e, s, now());
}

void World::set_coordinator(RadioState s)
{
    coord_desired_ = s;
    if (coord_tx_depth_ == 0)
        set_state(coord, s);
}

bool World::coordinator_awake() const { return !asleep(ledger.state(coord)); }

void World::coordinator_transmit(TxKind kind, SimTime duration)
{
    ++coord_tx_depth_;
    set_state(coord, RadioState::Transmit);
    begin_tx(coord, kind, duration);
    engine.schedule_in(duration, coord, EventKind::TransmissionEnd, [this] {
        if (--coord_tx_depth_ == 0)
            set_state(coord, coord_desired_);
    });
}

PacketId World::create_packet(EntityId node, TrafficClass cls)
{
    Packet p;
    p.id = packets.size();
    p.source = node;
    p.destination = coord;
    p.cls = cls;
    p.size_bits = sc.traffic.payload_bits;
    p.created_at = now();
    packets.push_back(p);
    return p.id;
}

namespace {

std::size_t first_waiting(const std::deque<PacketId>& q, const std::optional<PacketId>& flying)
{
    return (flying && !q.empty() && q.front() == *flying) ? 1 : 0;
}

}  // namespace

void World::enqueue(EntityId node, PacketId id)
{
    auto& q = queues.at(node);
    q.push_back(id);
    if (q.size() > sc.traffic.queue_capacity) {
        // Oldest waiting packet goes, preferring non-emergency traffic.
        std::size_t victim = first_waiting(q, in_flight[node]);
        for (std::size_t i = victim; i < q.size(); ++i) {
            if (packets[q[i]].cls != TrafficClass::Emergency) {
                victim = i;
                break;
            }
        }
        const PacketId v = q[victim];
        q.erase(q.begin() + static_cast<std::ptrdiff_t>(victim));
        drop(v, DropReason::QueueOverflow);
    }
    if (!q.empty() && !packets[q.front()].head_at)
        packets[q.front()].head_at = now();
}

void World::enqueue_front(EntityId node, PacketId id)
{
    auto& q = queues.at(node);
    const auto pos = first_waiting(q, in_flight[node]);
    q.insert(q.begin() + static_cast<std::ptrdiff_t>(pos), id);
    if (q.size() > sc.traffic.queue_capacity) {
        std::size_t victim = q.size() - 1;
        for (std::size_t i = pos + 1; i < q.size(); ++i) {
            if (packets[q[i]].cls != TrafficClass::Emergency) {
                victim = i;
                break;
            }
        }
        const PacketId v = q[victim];
        q.erase(q.begin() + static_cast<std::ptrdiff_t>(victim));
        drop(v, DropReason::QueueOverflow);
    }
    if (!packets[q.front()].head_at)
        packets[q.front()].head_at = now();
}

std::optional<PacketId> World::head(EntityId node)
{
    const auto& q = queues.at(node);
    if (q.empty())
        return std::nullopt;
    return q.front();
}

void World::pop_head(EntityId node)
{
    auto& q = queues.at(node);
    q.pop_front();
    if (!q.empty() && !packets[q.front()].head_at)
        packets[q.front()].head_at = now();
}

void World::deliver(PacketId id)
{
    auto& p = packets[id];
    p.delivered_at = now();
    switch (p.cls) {
    case TrafficClass::Emergency:
        detectors_[p.source].resolve();
        break;
    case TrafficClass::OnDemandContinuous:
    case TrafficClass::OnDemandNonContinuous:
        if (auto* s = sessions.find(p.source); s && s->active() && s->on_delivered())
            mac->on_session_closed(p.source);
        break;
    case TrafficClass::Normal:
        break;
    }
}

void World::drop(PacketId id, DropReason r)
{
    auto& p = packets[id];
    p.dropped = r;
    if (p.cls == TrafficClass::Emergency)
        detectors_[p.source].resolve();
}

bool World::after_failure(EntityId node, DropReason r)
{
    if (++retries[node] <= sc.csma.max_retries)
        return true;
    retries[node] = 0;
    const PacketId id = queues[node].front();
    pop_head(node);
    drop(id, r);
    return false;
}

void World::after_success(EntityId node)
{
    retries[node] = 0;
    pop_head(node);
}

void World::drop_head(EntityId node, DropReason r)
{
    retries[node] = 0;
    const PacketId id = queues[node].front();
    pop_head(node);
    drop(id, r);
}

void World::prune_medium()
{
    while (!medium_.empty() && medium_.front().end + kMediumHorizon < now()) {
        medium_.pop_front();
        ++medium_base_;
    }
}

std::size_t World::begin_tx(EntityId tx, TxKind kind, SimTime duration, TrafficClass cls)
{
    prune_medium();
    const SimTime t = now();
    if (kind == TxKind::Data) {
        for (const auto& r : medium_)
            if (r.kind == TxKind::Data && r.tx != tx && r.start <= t && t < r.end)
                ++counters.data_overlaps;
    }
    medium_.push_back({tx, kind, t, t + duration, tx_power(tx)});
    if (opts.keep_tx_log)
        tx_log_.push_back({tx, kind, t, t + duration, cls});
    return medium_base_ + medium_.size() - 1;
}

CcaResult World::cca(EntityId listener)
{
    // Energy is integrated over [t - cca, t); a frame starting exactly at t is not seen.
    const SimTime t = now();
    const SimTime from = t - std::min(t, sc.csma.cca_duration);
    std::vector<ActiveTransmission> active;
    std::vector<EntityId> ids;
    for (const auto& r : medium_) {
        if (r.tx == listener || !(r.start < t && from < r.end))
            continue;
        active.push_back({r.tx, r.power_dbm, geometry(r.tx, listener)});
        ids.push_back(r.tx);
    }
    const auto res = assess_channel(listener, active, sc.channel);
    if (opts.on_cca)
        opts.on_cca({t, listener, res, std::move(ids)});
    return res;
}

ReceptionOutcome World::resolve_at_coordinator(std::size_t tx_index) const
{
    const auto& rec = tx_record(tx_index);
    const Transmission intended{rec.tx, rec.power_dbm, geometry(rec.tx, coord), rec.start, rec.end};
    std::vector<Transmission> overlapping;
    for (std::size_t i = 0; i < medium_.size(); ++i) {
        if (medium_base_ + i == tx_index)
            continue;
        const auto& r = medium_[i];
        const Transmission other{r.tx, r.power_dbm, geometry(r.tx, coord), r.start, r.end};
        if (other.overlaps(intended))
            overlapping.push_back(other);
    }
    auto out = resolve_reception(coord, intended, overlapping, sc.channel);
    // A coordinator that slept through any part of the frame cannot decode it.
    if (out.status == ReceptionStatus::Delivered && !(coordinator_awake() && coord_awake_since_ <= rec.start))
        out.status = ReceptionStatus::LostBelowSensitivity;
    return out;
}

void World::exchange(EntityId node, std::function<void(ExchangeResult)> done)
{
    const PacketId pid = queues.at(node).front();
    in_flight[node] = pid;
    auto& p = packets[pid];
    ++p.attempts;
    const SimTime start = now();
    set_state(node, RadioState::Transmit);
    const auto idx = begin_tx(node, TxKind::Data, data_airtime(), p.cls);
    engine.schedule_in(data_airtime(), node, EventKind::TransmissionEnd, [this, node, pid, idx, start, done] {
        const auto out = resolve_at_coordinator(idx);
        set_state(node, RadioState::Receive);
        if (out.status == ReceptionStatus::Delivered) {
            packets[pid].tx_start = start;
            deliver(pid);
            const SimTime ack = sc.phy.airtime(sc.phy.ack_bits);
            engine.schedule_in(sc.phy.turnaround, coord, EventKind::Timer, [this, node, ack, done] {
                coordinator_transmit(TxKind::Ack, ack);
                engine.schedule_in(ack, node, EventKind::TransmissionEnd, [this, node, done] {
                    in_flight[node].reset();
                    done({true, DropReason::Unsent});
                });
            });
        } else {
            DropReason reason = DropReason::LinkBudget;
            if (out.status == ReceptionStatus::LostCollision) {
                reason = DropReason::Collision;
                ++counters.collisions;
            }
            engine.schedule_in(sc.csma.ack_timeout, node, EventKind::Timer, [this, node, reason, done] {
                in_flight[node].reset();
                done({false, reason});
            });
        }
    });
}

std::uint32_t World::channel_of(EntityId e) const
{
    return e == coord ? sc.wakeup.coordinator_channel : sc.nodes[e].wakeup_channel;
}

std::vector<EntityId> World::send_wakeup(EntityId origin, WakeupPurpose purpose, std::uint32_t channel,
                                         const std::vector<EntityId>& intended)
{
    std::vector<WakeupReceiver> population;
    for (EntityId e = 0; e <= coord; ++e)
        population.push_back({e, channel_of(e), true});
    const WakeupSignal sig{origin, sc.wakeup.mode, channel, purpose, 1, sc.wakeup.signal_duration};
    const auto d = deliver_wakeup(sig, population, intended);
    ++counters.wakeup_signals;
    counters.false_wakeups += d.false_wakeups;
    const SimTime cost = sc.wakeup.false_wake_cost;
    for (EntityId e : d.woken) {
        if (std::find(intended.begin(), intended.end(), e) != intended.end() || cost == 0)
            continue;
        const RadioState prev = state(e);
        if (!asleep(prev))
            continue;
        set_state(e, RadioState::Receive);
        const SimTime woke = now();
        engine.schedule_in(cost, e, EventKind::Timer, [this, e, prev, woke] {
            // Only undo our own transition; the MAC may have taken the radio meanwhile.
            if (state(e) == RadioState::Receive && ledger.since(e) == woke)
                set_state(e, prev);
        });
    }
    return d.woken;
}

LinkGeometry World::geometry(EntityId from, EntityId to) const
{
    struct Pos {
        Placement placement;
        double distance;
        double bearing;
        double depth;
    };
    auto pos = [&](EntityId e) {
        if (e == coord)
            return Pos{Placement::OnBody, 0.0, 0.0, 0.0};
        const auto& c = sc.nodes[e];
        return Pos{c.placement, c.distance_m, c.bearing_deg * std::numbers::pi / 180.0,
                   c.placement == Placement::InBody ? c.depth_m : 0.0};
    };
    const Pos a = pos(from);
    const Pos b = pos(to);
    const double sq = a.distance * a.distance + b.distance * b.distance
                      - 2.0 * a.distance * b.distance * std::cos(a.bearing - b.bearing);
    const double surface = std::sqrt(std::max(sq, 0.0));
    const double depth = std::max(a.depth, b.depth);
    return {std::max({surface, depth, kMinDistance}), a.placement, b.placement, depth};
}

double World::tx_power(EntityId e) const { return e == coord ? 0.0 : sc.nodes[e].tx_power_dbm; }

void World::schedule_arrivals(EntityId node, const std::vector<SimTime>& times)
{
    // Scheduled up front so an arrival always precedes a window opening at the same instant.
    for (SimTime t : times) {
        engine.schedule(t, node, EventKind::PacketArrival, [this, node] {
            enqueue(node, create_packet(node, TrafficClass::Normal));
            mac->on_enqueue(node);
        });
    }
}

void World::schedule_readings(EntityId node, std::shared_ptr<std::vector<Reading>> readings, std::size_t i)
{
    if (i >= readings->size())
        return;
    const auto r = (*readings)[i];
    engine.schedule(r.at, node, EventKind::Timer, [this, node, readings, i, r] {
        if (detectors_[node].observe(node, r.value, sc.emergency->config, now())) {
            ++counters.emergencies;
            mac->on_emergency(node, create_packet(node, TrafficClass::Emergency));
        }
        schedule_readings(node, readings, i + 1);
    });
}

void World::stream_packet(EntityId node, SimTime stop, SimTime interval)
{
    if (now() >= stop) {
        if (auto* s = sessions.find(node); s && s->active()) {
            s->stop();
            mac->on_session_closed(node);
        }
        return;
    }
    enqueue(node, create_packet(node, TrafficClass::OnDemandContinuous));
    mac->on_enqueue(node);
    engine.schedule_in(interval, node, EventKind::PacketArrival,
                       [this, node, stop, interval] { stream_packet(node, stop, interval); });
}

void World::schedule_ondemand(const OnDemandRequest& q)
{
    const EntityId target = *sc.find_node(q.node);
    engine.schedule(q.at, coord, EventKind::WakeupSignal, [this, q, target] {
        const auto count = q.kind == SessionKind::NonContinuous ? static_cast<std::uint32_t>(q.param) : 0U;
        try {
            sessions.request(coord, target, q.kind, count, sc.wakeup.mode, channel_of(target),
                             sc.wakeup.signal_duration);
        } catch (const SessionRejected&) {
            ++counters.ondemand_rejected;
            return;
        }
        const SimTime delay = mac->wakeup_delay();
        if (delay > 0) {
            const auto purpose = q.kind == SessionKind::Continuous ? WakeupPurpose::OnDemandContinuous
                                                                   : WakeupPurpose::OnDemandNonContinuous;
            send_wakeup(coord, purpose, channel_of(target), {target});
        }
        engine.schedule_in(delay, target, EventKind::WakeupSignal, [this, q, target, count] {
            sessions.find(target)->on_woken();
            mac->on_session_woken(target);
            if (q.kind == SessionKind::NonContinuous) {
                for (std::uint32_t k = 0; k < count; ++k) {
                    enqueue(target, create_packet(target, TrafficClass::OnDemandNonContinuous));
                    mac->on_enqueue(target);
                }
            } else {
                const SimTime interval = sc.ondemand.stream_interval.value_or(sc.tdma_params().frame_duration());
                stream_packet(target, q.param, interval);
            }
        });
    });
}

void World::schedule_sources()
{
    const bool patterned = std::all_of(sc.nodes.begin(), sc.nodes.end(), [](const NodeConfig& c) { return c.pattern.has_value(); });
    std::optional<WakeupTable> table;
    TdmaParams tp;
    if (patterned && n > 0) {
        table = sc.wakeup_table();
        tp = sc.tdma_params();
    }
    for (EntityId i = 0; i < n; ++i) {
        const auto& c = sc.nodes[i];
        const Rate rate = c.rate.value_or(sc.traffic.rate);
        if (rate.value <= 0.0)
            continue;
        auto rng = engine.stream("traffic." + c.id);
        std::optional<FrameGrid> grid;
        const WakeupPattern* pattern = nullptr;
        if (table) {
            pattern = &table->at(i).pattern;
            grid = FrameGrid{tp.frame_duration(), table->at(i).slot * tp.slot_duration};
        }
        schedule_arrivals(i, generate_normal(rate, sc.traffic.arrivals, pattern, grid, sc.duration, rng));
    }
    if (sc.emergency) {
        for (const auto& id : sc.emergency->nodes) {
            const EntityId node = *sc.find_node(id);
            auto rng = engine.stream("emergency." + id);
            auto readings =
                std::make_shared<std::vector<Reading>>(generate_emergency(sc.emergency->config, sc.duration, rng));
            schedule_readings(node, readings, 0);
        }
    }
    for (const auto& q : sc.ondemand.requests)
        schedule_ondemand(q);
}

RunResult World::run()
{
    switch (sc.mac) {
    case MacKind::Ptdma:
        mac = make_ptdma(*this);
        break;
    case MacKind::Csma:
    case MacKind::CsmaPrio:
    case MacKind::Smac:
        mac = make_csma(*this, sc.mac);
        break;
    case MacKind::Pbtdma:
        mac = make_pbtdma(*this);
        break;
    case MacKind::Beacon154:
        mac = make_beacon154(*this);
        break;
    }
    schedule_sources();
    mac->start();
    engine.run(sc.duration);
    ledger.finalize(sc.duration);
    counters.events = engine.processed();

    RunInfo info;
    info.scenario = sc.name;
    info.mac = std::string(to_string(sc.mac));
    info.seed = engine.seed();
    info.duration = sc.duration;
    if (sc.emergency)
        info.emergency_deadline = sc.emergency->config.deadline;
    for (const auto& c : sc.nodes)
        info.entity_names.push_back(c.id);
    info.entity_names.emplace_back(kCoordinatorId);
    info.counters = counters;

    RunResult r;
    r.report = summarize(ledger, packets, info);
    r.packets = std::move(packets);
    r.tx_log = std::move(tx_log_);
    r.table_versions = std::move(table_versions);
    return r;
}

// ---------------------------------------------------------------------------------------

ContentionDriver::ContentionDriver(World& w, Hooks hooks) : w_(w), hooks_(std::move(hooks))
{
    for (EntityId i = 0; i < w.n; ++i)
        nodes_.push_back({std::nullopt, w.engine.stream("csma." + w.sc.nodes[i].id), false, 1, {}});
}

void ContentionDriver::start(EntityId node, std::uint32_t w0)
{
    auto& ns = nodes_.at(node);
    w_.engine.cancel(ns.pending);
    ns.active = true;
    ns.w0 = w0;
    ns.csma.emplace(w0, w_.sc.csma);
    ns.csma->draw(ns.rng);
    arm(node);
}

void ContentionDriver::cancel(EntityId node)
{
    auto& ns = nodes_.at(node);
    w_.engine.cancel(ns.pending);
    ns.active = false;
}

void ContentionDriver::arm(EntityId node)
{
    auto& ns = nodes_[node];
    const auto& cfg = w_.sc.csma;
    const SimTime slot = cfg.backoff_slot;
    const SimTime aligned = (w_.now() + slot - 1) / slot * slot;
    const SimTime cca_start = aligned + static_cast<SimTime>(ns.csma->pending_backoff()) * slot;
    const SimTime cca_end = cca_start + cfg.cca_duration;
    const auto end = hooks_.period_end(w_.now());
    if (!end || cca_end + w_.exchange_span() > *end) {
        defer(node);
        return;
    }
    w_.set_state(node, hooks_.backoff_state);
    ns.pending = w_.engine.schedule(cca_start, node, EventKind::CcaSample, [this, node, cca_end] {
        auto& s = nodes_[node];
        w_.set_state(node, RadioState::CcaSense);
        s.pending = w_.engine.schedule(cca_end, node, EventKind::CcaSample, [this, node] {
            auto& st = nodes_[node];
            const auto verdict = w_.cca(node);
            const auto action = csma_step(*st.csma, verdict, st.rng);
            if (action == MacAction::Backoff) {
                arm(node);
                return;
            }
            st.active = false;
            hooks_.on_result(node, action);
        });
    });
}

void ContentionDriver::defer(EntityId node)
{
    auto& ns = nodes_[node];
    if (hooks_.on_defer) {
        ns.active = false;
        hooks_.on_defer(node);
        return;
    }
    const SimTime next = hooks_.next_period(w_.now());
    w_.set_state(node, RadioState::Sleep);
    if (next == kTimeMax || next > w_.sc.duration) {
        ns.active = false;
        return;
    }
    ns.pending = w_.engine.schedule(next, node, EventKind::Timer, [this, node] {
        auto& s = nodes_[node];
        s.csma->reset();
        s.csma->draw(s.rng);
        arm(node);
    });
}

}  // namespace bsn::sim
