#include "sim/world.hpp"

namespace bsn::sim {

namespace {

/// Round-robin slots announced by a coordinator preamble.
class PbtdmaMac final : public Mac {
public:
    explicit PbtdmaMac(World& w) : Mac(w), cfg_(w.sc.pbtdma) {}

    void start() override { slot(0); }
    void on_enqueue(EntityId) override {}

private:
    void slot(std::uint64_t k)
    {
        const SimTime at = k * cfg_.slot_duration;
        if (at > w_.sc.duration || w_.n == 0)
            return;
        w_.engine.schedule(at, w_.coord, EventKind::SlotBoundary, [this, k, at] {
            const auto owner = static_cast<EntityId>(k % w_.n);
            const SimTime end = at + cfg_.slot_duration;
            w_.set_coordinator(RadioState::Receive);
            w_.coordinator_transmit(TxKind::Preamble, cfg_.preamble_duration);
            for (EntityId i = 0; i < w_.n; ++i)
                w_.set_state(i, RadioState::Receive);
            w_.engine.schedule(at + cfg_.preamble_duration, owner, EventKind::Timer, [this, owner, end] {
                for (EntityId i = 0; i < w_.n; ++i)
                    if (i != owner)
                        w_.set_state(i, RadioState::Sleep);
                serve(owner, end);
            });
            slot(k + 1);
        });
    }

    void serve(EntityId node, SimTime end)
    {
        if (!w_.head(node) || w_.now() + w_.exchange_span() > end) {
            w_.set_state(node, RadioState::IdleListen);
            return;
        }
        w_.exchange(node, [this, node, end](ExchangeResult r) {
            if (r.ok)
                w_.after_success(node);
            else
                w_.after_failure(node, r.reason);
            serve(node, end);
        });
    }

    PreambleSlotConfig cfg_;
};

}  // namespace

std::unique_ptr<Mac> make_pbtdma(World& w) { return std::make_unique<PbtdmaMac>(w); }

}  // namespace bsn::sim
