#include "sim/world.hpp"

#include <algorithm>

namespace bsn::sim {

namespace {

/// Queue service through CSMA/CA: contend for the head packet, exchange, repeat.
class ContentionMac : public Mac {
public:
    ContentionMac(World& w, MacKind kind) : Mac(w), kind_(kind), active_(w.n, false) {}

    void on_enqueue(EntityId node) override
    {
        if (!active_[node])
            begin(node);
    }

protected:
    void make_driver(ContentionDriver::Hooks hooks)
    {
        hooks.on_result = [this](EntityId node, MacAction a) { on_access(node, a); };
        driver_.emplace(w_, std::move(hooks));
    }

    /// Radio state of an idle node at the current instant.
    virtual RadioState rest(EntityId node) const = 0;
    /// Whether this node's traffic goes through contention.
    virtual bool contends(EntityId) const { return true; }

    std::uint32_t window_for(EntityId node, PacketId pkt) const
    {
        const auto& cfg = w_.sc.csma;
        if (kind_ != MacKind::CsmaPrio)
            return cfg.w0_standard;
        if (w_.packets[pkt].cls == TrafficClass::Emergency)
            return cfg.w0_critical;
        return initial_window(w_.sc.nodes[node].priority, cfg);
    }

    void begin(EntityId node)
    {
        const auto h = w_.head(node);
        if (!h || !contends(node)) {
            active_[node] = false;
            w_.set_state(node, rest(node));
            return;
        }
        active_[node] = true;
        driver_->start(node, window_for(node, *h));
    }

    void on_access(EntityId node, MacAction a)
    {
        if (a == MacAction::AccessFailure) {
            w_.drop_head(node, DropReason::AccessFailure);
            begin(node);
            return;
        }
        w_.exchange(node, [this, node](ExchangeResult r) {
            if (r.ok)
                w_.after_success(node);
            else
                w_.after_failure(node, r.reason);
            begin(node);
        });
    }

    MacKind kind_;
    std::vector<bool> active_;
    std::optional<ContentionDriver> driver_;
};

/// Always-on CSMA/CA, optionally with per-class contention windows.
class CsmaMac final : public ContentionMac {
public:
    CsmaMac(World& w, MacKind kind) : ContentionMac(w, kind)
    {
        make_driver({[](SimTime) -> std::optional<SimTime> { return kTimeMax; },
                     [](SimTime) { return kTimeMax; },
                     {},
                     {},
                     RadioState::IdleListen});
    }

    void start() override
    {
        w_.set_coordinator(RadioState::Receive);
        for (EntityId i = 0; i < w_.n; ++i)
            w_.set_state(i, RadioState::IdleListen);
    }

private:
    RadioState rest(EntityId) const override { return RadioState::IdleListen; }
};

/// Synchronized listen/sleep duty cycle with contention inside listen periods.
class SmacMac final : public ContentionMac {
public:
    explicit SmacMac(World& w) : ContentionMac(w, MacKind::Smac), cfg_(w.sc.smac)
    {
        make_driver({[this](SimTime t) -> std::optional<SimTime> {
                         if (!smac_listening(cfg_, t))
                             return std::nullopt;
                         return smac_listen_end(cfg_, t);
                     },
                     [this](SimTime t) { return smac_next_listen(cfg_, t + 1); },
                     {},
                     {},
                     RadioState::IdleListen});
    }

    void start() override { listen(0); }

private:
    RadioState rest(EntityId) const override
    {
        return smac_listening(cfg_, w_.now()) ? RadioState::IdleListen : RadioState::Sleep;
    }

    void listen(SimTime at)
    {
        if (at > w_.sc.duration)
            return;
        w_.engine.schedule(at, w_.coord, EventKind::SlotBoundary, [this, at] {
            w_.set_coordinator(RadioState::Receive);
            for (EntityId i = 0; i < w_.n; ++i)
                if (!active_[i])
                    w_.set_state(i, RadioState::IdleListen);
            w_.engine.schedule(at + cfg_.listen_duration, w_.coord, EventKind::SlotBoundary, [this] {
                w_.set_coordinator(RadioState::Sleep);
                for (EntityId i = 0; i < w_.n; ++i)
                    if (!active_[i])
                        w_.set_state(i, RadioState::Sleep);
            });
            listen(at + cfg_.cycle());
        });
    }

    DutyCycleConfig cfg_;
};

/// Beacon-enabled superframes: CAP contention plus guaranteed time slots.
class Beacon154Mac final : public ContentionMac {
public:
    explicit Beacon154Mac(World& w) : ContentionMac(w, MacKind::Beacon154), cfg_(w.sc.superframe), gts_(cfg_)
    {
        make_driver({[this](SimTime t) -> std::optional<SimTime> {
                         const auto l = superframe_layout(cfg_, t / cfg_.beacon_interval);
                         if (t >= l.beacon.end && t < l.cap.end)
                             return l.cap.end;
                         return std::nullopt;
                     },
                     [this](SimTime t) {
                         const auto idx = t / cfg_.beacon_interval;
                         const auto here = superframe_layout(cfg_, idx);
                         if (t < here.beacon.end)
                             return here.beacon.end;
                         return superframe_layout(cfg_, idx + 1).beacon.end;
                     },
                     {},
                     {},
                     RadioState::IdleListen});
    }

    void start() override { beacon(0); }

    void on_enqueue(EntityId node) override
    {
        if (w_.sc.nodes[node].gts && !gts_.slot_of(node)) {
            if (std::find(requests_.begin(), requests_.end(), node) == requests_.end())
                requests_.push_back(node);
        }
        if (!active_[node] && contends(node))
            begin(node);
    }

private:
    RadioState rest(EntityId) const override { return RadioState::Sleep; }
    bool contends(EntityId node) const override { return !gts_.slot_of(node).has_value(); }

    void beacon(std::uint64_t k)
    {
        const auto l = superframe_layout(cfg_, k);
        if (l.beacon.start > w_.sc.duration)
            return;
        w_.engine.schedule(l.beacon.start, w_.coord, EventKind::Beacon, [this, k, l] {
            // Requests stand while the node still has data and no slot.
            std::vector<EntityId> reqs;
            for (EntityId node : requests_)
                if (!gts_.slot_of(node) && w_.head(node))
                    reqs.push_back(node);
            const auto res = gts_.on_beacon(reqs, used_);
            used_.clear();
            w_.counters.gts_denied += res.denied.size();
            w_.counters.gts_revoked += res.revoked.size();
            requests_ = res.denied;
            for (EntityId node : res.granted) {
                driver_->cancel(node);
                active_[node] = false;
            }
            for (EntityId node : res.revoked)
                if (w_.head(node))
                    requests_.push_back(node);

            w_.set_coordinator(RadioState::Receive);
            w_.coordinator_transmit(TxKind::Beacon, cfg_.beacon_duration);
            for (EntityId i = 0; i < w_.n; ++i)
                if (!w_.in_flight[i])
                    w_.set_state(i, RadioState::Receive);

            w_.engine.schedule(l.beacon.end, w_.coord, EventKind::Timer, [this] {
                for (EntityId i = 0; i < w_.n; ++i) {
                    if (active_[i])
                        continue;
                    if (contends(i) && w_.head(i))
                        begin(i);
                    else
                        w_.set_state(i, RadioState::Sleep);
                }
            });
            for (std::uint32_t j = 0; j < l.gts.size(); ++j) {
                const auto owner = gts_.allocation()[j];
                if (!owner)
                    continue;
                const auto slot = l.gts[j];
                w_.engine.schedule(slot.start, *owner, EventKind::SlotBoundary,
                                   [this, node = *owner, slot] { serve(node, slot.end); });
            }
            w_.engine.schedule(l.inactive.start, w_.coord, EventKind::Timer,
                               [this] { w_.set_coordinator(RadioState::Sleep); });
            beacon(k + 1);
        });
    }

    void serve(EntityId node, SimTime end)
    {
        if (!w_.head(node) || w_.now() + w_.exchange_span() > end) {
            w_.set_state(node, RadioState::Sleep);
            return;
        }
        used_.insert(node);
        w_.exchange(node, [this, node, end](ExchangeResult r) {
            if (r.ok)
                w_.after_success(node);
            else
                w_.after_failure(node, r.reason);
            serve(node, end);
        });
    }

    SuperframeConfig cfg_;
    GtsManager gts_;
    std::vector<EntityId> requests_;
    std::set<EntityId> used_;
};

}  // namespace

std::unique_ptr<Mac> make_csma(World& w, MacKind kind)
{
    if (kind == MacKind::Smac)
        return std::make_unique<SmacMac>(w);
    return std::make_unique<CsmaMac>(w, kind);
}

std::unique_ptr<Mac> make_beacon154(World& w) { return std::make_unique<Beacon154Mac>(w); }

}  // namespace bsn::sim
