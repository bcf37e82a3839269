#include "sim/world.hpp"

#include <algorithm>

namespace bsn::sim {

namespace {

class PtdmaMac final : public Mac {
public:
    explicit PtdmaMac(World& w)
        : Mac(w),
          table_(w.sc.wakeup_table()),
          params_(w.sc.tdma_params()),
          schedule_(build_schedule(table_, params_)),
          override_(w.n, false),
          closing_(w.n, false),
          hold_until_(w.n, 0),
          window_end_(w.n, std::nullopt),
          serving_(w.n, false),
          last_window_frame_(w.n, kNoFrame),
          emergency_(w.n, false)
    {
        ContentionDriver::Hooks hooks;
        hooks.period_end = [this](SimTime t) -> std::optional<SimTime> {
            if (period_ && t >= period_->start && t < period_->end)
                return period_->end;
            return std::nullopt;
        };
        hooks.next_period = [](SimTime) { return kTimeMax; };
        hooks.on_result = [this](EntityId node, MacAction a) {
            if (a == MacAction::AccessFailure)
                emergency_failed(node, DropReason::AccessFailure);
            else
                emergency_exchange(node);
        };
        hooks.on_defer = [this](EntityId node) { emergency_failed(node, DropReason::AccessFailure); };
        hooks.backoff_state = RadioState::IdleListen;
        driver_.emplace(w_, std::move(hooks));
    }

    void start() override
    {
        for (EntityId i = 0; i < w_.n; ++i)
            w_.set_state(i, RadioState::WakeupListen);
        w_.table_versions.emplace_back(0, table_.version());
        for (const auto& u : w_.sc.ptdma.updates) {
            const EntityId node = *w_.sc.find_node(u.node);
            w_.engine.schedule(u.at, w_.coord, EventKind::Timer, [this, node, pattern = u.pattern] {
                pending_ = (pending_ ? *pending_ : table_).update_pattern(node, pattern);
            });
        }
        frame(0);
    }

    void on_enqueue(EntityId node) override
    {
        if (window_end_[node] && !serving_[node])
            serve(node);
    }

    void on_emergency(EntityId node, PacketId pkt) override
    {
        w_.enqueue_front(node, pkt);
        emergency_[node] = true;
        request(node);
        on_enqueue(node);
    }

    SimTime wakeup_delay() const override { return w_.sc.wakeup.signal_duration; }

    void on_session_woken(EntityId node) override
    {
        override_[node] = true;
        closing_[node] = false;
        refresh_coordinator();
        const SimTime F = schedule_.frame_duration;
        const std::uint64_t g = w_.now() / F;
        const SimTime start = g * F + table_.at(node).slot * params_.slot_duration;
        if (start >= w_.now() && last_window_frame_[node] != g)
            schedule_window(node, g, start);
    }

    void on_session_closed(EntityId node) override { closing_[node] = true; }

private:
    static constexpr std::uint64_t kNoFrame = std::numeric_limits<std::uint64_t>::max();

    struct Period {
        SimTime start;
        SimTime end;
        std::vector<EntityId> nodes;
    };

    bool has_window(EntityId node, std::uint32_t frame_in_hp) const
    {
        return table_.at(node).pattern.active(frame_in_hp) || override_[node];
    }

    bool coordinator_needed() const
    {
        if (period_ || grant_pending_ || !waiting_.empty())
            return true;
        for (EntityId i = 0; i < w_.n; ++i)
            if (override_[i])
                return true;
        return schedule_.coordinator_active_at(w_.now());
    }

    void refresh_coordinator()
    {
        w_.set_coordinator(coordinator_needed() ? RadioState::Receive : RadioState::WakeupListen);
    }

    void frame(std::uint64_t g)
    {
        const SimTime F = schedule_.frame_duration;
        const SimTime at = g * F;
        if (at > w_.sc.duration)
            return;
        w_.engine.schedule(at, w_.coord, EventKind::FrameBoundary, [this, g, at] {
            const auto fi = static_cast<std::uint32_t>(g % schedule_.length);
            if (fi == 0) {
                if (pending_) {
                    table_ = *pending_;
                    pending_.reset();
                    schedule_ = build_schedule(table_, params_);
                    w_.table_versions.emplace_back(at, table_.version());
                }
                for (EntityId i = 0; i < w_.n; ++i) {
                    if (closing_[i]) {
                        override_[i] = false;
                        closing_[i] = false;
                    }
                }
            }
            refresh_coordinator();
            for (const auto& [node, entry] : table_.entries()) {
                if (has_window(node, fi))
                    schedule_window(node, g, at + entry.slot * params_.slot_duration);
            }
            frame(g + 1);
        });
    }

    void schedule_window(EntityId node, std::uint64_t g, SimTime start)
    {
        last_window_frame_[node] = g;
        const SimTime end = start + params_.slot_duration - params_.guard_time;
        w_.engine.schedule(start, node, EventKind::SlotBoundary, [this, node, start, end] {
            if (hold_until_[node] > start)
                return;
            window_end_[node] = end;
            serve(node);
            w_.engine.schedule(end, node, EventKind::SlotBoundary, [this, node, end] {
                if (window_end_[node] == end)
                    window_end_[node].reset();
            });
        });
    }

    void serve(EntityId node)
    {
        const auto end = window_end_[node];
        if (!end || !w_.head(node) || w_.now() + w_.exchange_span() > *end || in_emergency(node)) {
            serving_[node] = false;
            if (w_.now() >= slot_busy_until_)
                slot_busy_until_ = 0;
            if (!in_emergency(node))
                w_.set_state(node, RadioState::WakeupListen);
            return;
        }
        serving_[node] = true;
        slot_busy_until_ = *end + params_.guard_time;
        w_.exchange(node, [this, node](ExchangeResult r) {
            const bool was_emergency = w_.packets[w_.queues[node].front()].cls == TrafficClass::Emergency;
            if (r.ok) {
                w_.after_success(node);
                if (was_emergency)
                    emergency_[node] = false;
            } else if (!w_.after_failure(node, r.reason) && was_emergency) {
                emergency_[node] = false;
            }
            serve(node);
        });
    }

    bool in_emergency(EntityId node) const
    {
        return period_ && std::find(period_->nodes.begin(), period_->nodes.end(), node) != period_->nodes.end();
    }

    // Emergency handling -----------------------------------------------------------------

    /// The node signals the coordinator through the wake-up radio.
    void request(EntityId node)
    {
        w_.send_wakeup(node, WakeupPurpose::Emergency, w_.sc.wakeup.coordinator_channel, {w_.coord});
        w_.engine.schedule_in(w_.sc.wakeup.signal_duration, w_.coord, EventKind::WakeupSignal, [this, node] {
            if (std::find(waiting_.begin(), waiting_.end(), node) == waiting_.end())
                waiting_.push_back(node);
            refresh_coordinator();
            try_grant();
        });
    }

    void try_grant()
    {
        if (period_ || grant_pending_ || waiting_.empty())
            return;
        // Non-preemptive: a slot already being used runs to its end.
        const SimTime g = std::max(w_.now(), slot_busy_until_);
        const SimTime sig = w_.sc.wakeup.signal_duration;
        Period p{g + sig, g + sig + waiting_.size() * params_.slot_duration, std::move(waiting_)};
        waiting_.clear();

        std::vector<EntityId> held = hold_windows(g, p.end);
        grant_pending_ = true;
        w_.engine.schedule(g, w_.coord, EventKind::WakeupSignal, [this, p, held] {
            signal_grant(p.nodes, held);
            grant_pending_ = false;
            period_ = p;
            w_.engine.schedule(p.start, w_.coord, EventKind::Timer, [this] { open_period(); });
            w_.engine.schedule(p.end, w_.coord, EventKind::Timer, [this] { close_period(); });
        });
    }

    std::vector<EntityId> hold_windows(SimTime from, SimTime to)
    {
        std::vector<EntityId> held;
        const SimTime F = schedule_.frame_duration;
        for (const auto& [node, entry] : table_.entries()) {
            for (std::uint64_t g = from / F; g * F < to; ++g) {
                const SimTime s = g * F + entry.slot * params_.slot_duration;
                const SimTime e = s + params_.slot_duration - params_.guard_time;
                const auto fi = static_cast<std::uint32_t>(g % schedule_.length);
                if (s < to && e > from && has_window(node, fi)) {
                    hold_until_[node] = std::max(hold_until_[node], to);
                    held.push_back(node);
                    break;
                }
            }
        }
        return held;
    }

    void signal_grant(const std::vector<EntityId>& granted, const std::vector<EntityId>& held)
    {
        if (w_.sc.wakeup.mode == WakeupMode::Broadcast) {
            std::vector<EntityId> intended = granted;
            intended.insert(intended.end(), held.begin(), held.end());
            w_.send_wakeup(w_.coord, WakeupPurpose::Grant, 0, intended);
            return;
        }
        for (EntityId node : granted)
            w_.send_wakeup(w_.coord, WakeupPurpose::Grant, w_.channel_of(node), {node});
        for (EntityId node : held)
            if (std::find(granted.begin(), granted.end(), node) == granted.end())
                w_.send_wakeup(w_.coord, WakeupPurpose::Hold, w_.channel_of(node), {node});
    }

    void open_period()
    {
        const auto nodes = period_->nodes;
        for (EntityId node : nodes) {
            if (!emergency_[node] || serving_[node])
                continue;
            if (nodes.size() == 1) {
                w_.set_state(node, RadioState::IdleListen);
                emergency_exchange(node);
            } else {
                driver_->start(node, w_.sc.csma.w0_critical);
            }
        }
    }

    void emergency_exchange(EntityId node)
    {
        // The packet may have been sent in the node's own window meanwhile.
        if (!emergency_[node] || !w_.head(node)) {
            w_.set_state(node, RadioState::WakeupListen);
            return;
        }
        if (!period_ || w_.now() + w_.exchange_span() > period_->end) {
            emergency_failed(node, DropReason::AccessFailure);
            return;
        }
        w_.exchange(node, [this, node](ExchangeResult r) {
            if (r.ok) {
                w_.after_success(node);
                emergency_[node] = false;
                w_.set_state(node, RadioState::WakeupListen);
            } else {
                emergency_failed(node, r.reason);
            }
        });
    }

    void emergency_failed(EntityId node, DropReason reason)
    {
        w_.set_state(node, RadioState::WakeupListen);
        if (!emergency_[node] || !w_.head(node))
            return;
        if (!w_.after_failure(node, reason)) {
            emergency_[node] = false;
            return;
        }
        request(node);
    }

    void close_period()
    {
        const auto nodes = period_->nodes;
        period_.reset();
        for (EntityId node : nodes) {
            if (driver_->busy(node)) {
                driver_->cancel(node);
                emergency_failed(node, DropReason::AccessFailure);
            }
        }
        refresh_coordinator();
        try_grant();
    }

    WakeupTable table_;
    TdmaParams params_;
    TdmaSchedule schedule_;
    std::optional<WakeupTable> pending_;
    std::vector<bool> override_;
    std::vector<bool> closing_;
    std::vector<SimTime> hold_until_;
    std::vector<std::optional<SimTime>> window_end_;
    std::vector<bool> serving_;
    std::vector<std::uint64_t> last_window_frame_;
    std::vector<bool> emergency_;
    std::vector<EntityId> waiting_;
    std::optional<Period> period_;
    bool grant_pending_ = false;
    SimTime slot_busy_until_ = 0;
    std::optional<ContentionDriver> driver_;
};

}  // namespace

std::unique_ptr<Mac> make_ptdma(World& w) { return std::make_unique<PtdmaMac>(w); }

}  // namespace bsn::sim
