#pragma once

#include "bsn/simulation.hpp"

#include <deque>
#include <memory>
#include <optional>
#include <set>
#include <vector>

namespace bsn::sim {

class World;

/// Outcome of one data exchange as seen by the sender.
struct ExchangeResult {
    bool ok;
    DropReason reason;  // meaningful when !ok
};

class Mac {
public:
    explicit Mac(World& w) : w_(w) {}
    virtual ~Mac() = default;
    Mac(const Mac&) = delete;
    Mac& operator=(const Mac&) = delete;

    virtual void start() = 0;
    /// A packet was appended to the node's queue.
    virtual void on_enqueue(EntityId node) = 0;
    /// A threshold event produced an emergency packet at the node.
    virtual void on_emergency(EntityId node, PacketId pkt);
    /// Delay between an on-demand request and the node being able to serve it.
    virtual SimTime wakeup_delay() const { return 0; }
    virtual void on_session_woken(EntityId) {}
    virtual void on_session_closed(EntityId) {}

protected:
    World& w_;
};

/// Shared per-run state: clock, medium, queues, packets, ledger and counters.
class World {
public:
    World(const Scenario& scenario, std::uint64_t seed, const RunOptions& options);
    ~World();

    RunResult run();

    Engine engine;
    const Scenario& sc;
    const RunOptions& opts;
    const std::size_t n;
    const EntityId coord;
    EnergyLedger ledger;
    RunCounters counters;
    std::vector<Packet> packets;
    std::vector<std::deque<PacketId>> queues;
    std::vector<std::optional<PacketId>> in_flight;
    std::vector<std::uint32_t> retries;
    std::vector<std::pair<SimTime, std::uint64_t>> table_versions;
    OnDemandManager sessions;
    std::unique_ptr<Mac> mac;

    SimTime now() const { return engine.now(); }
    SimTime exchange_span() const;
    SimTime data_airtime() const { return sc.phy.airtime(sc.traffic.payload_bits); }

    // Radio state
    void set_state(EntityId e, RadioState s);
    RadioState state(EntityId e) const { return ledger.state(e); }
    /// Requested coordinator state; deferred while the coordinator is transmitting.
    void set_coordinator(RadioState s);
    bool coordinator_awake() const;
    /// Coordinator transmission (ACK, beacon, preamble); restores the requested state after.
    void coordinator_transmit(TxKind kind, SimTime duration);

    // Packets and queues
    PacketId create_packet(EntityId node, TrafficClass cls);
    /// Appends, dropping the oldest waiting packet on overflow.
    void enqueue(EntityId node, PacketId id);
    /// Inserts right behind any in-flight packet.
    void enqueue_front(EntityId node, PacketId id);
    std::optional<PacketId> head(EntityId node);
    void pop_head(EntityId node);
    void deliver(PacketId id);
    void drop(PacketId id, DropReason r);
    /// Applies the retry policy after a failed exchange of the node's head packet. Returns
    /// true when the packet is retried, false when it was dropped.
    bool after_failure(EntityId node, DropReason r);
    /// Clears retry state after a successful exchange and pops the head.
    void after_success(EntityId node);
    /// Drops the head packet without retrying.
    void drop_head(EntityId node, DropReason r);

    // Medium
    struct TxRecord {
        EntityId tx;
        TxKind kind;
        SimTime start;
        SimTime end;
        double power_dbm;
    };
    std::size_t begin_tx(EntityId tx, TxKind kind, SimTime duration, TrafficClass cls = TrafficClass::Normal);
    CcaResult cca(EntityId listener);
    ReceptionOutcome resolve_at_coordinator(std::size_t tx_index) const;
    const TxRecord& tx_record(std::size_t i) const { return medium_.at(i - medium_base_); }

    /// Data exchange of the node's head packet: data airtime, reception at the
    /// coordinator, then an ACK on success or an ACK timeout on failure. Node state is
    /// Transmit then Receive; on return the node is left in Receive for the caller.
    void exchange(EntityId node, std::function<void(ExchangeResult)> done);

    // Wake-up radio
    /// Delivers a wake-up signal and charges false wake-ups. Returns the woken entities.
    std::vector<EntityId> send_wakeup(EntityId origin, WakeupPurpose purpose, std::uint32_t channel,
                                      const std::vector<EntityId>& intended);
    std::uint32_t channel_of(EntityId e) const;

    LinkGeometry geometry(EntityId from, EntityId to) const;
    double tx_power(EntityId e) const;

private:
    void prune_medium();
    void schedule_sources();
    void schedule_arrivals(EntityId node, const std::vector<SimTime>& times);
    void schedule_readings(EntityId node, std::shared_ptr<std::vector<Reading>> readings, std::size_t i);
    void schedule_ondemand(const OnDemandRequest& q);
    void stream_packet(EntityId node, SimTime stop, SimTime interval);

    std::deque<TxRecord> medium_;
    std::size_t medium_base_ = 0;
    std::vector<TxLogEntry> tx_log_;
    RadioState coord_desired_ = RadioState::Sleep;
    std::uint32_t coord_tx_depth_ = 0;
    SimTime coord_awake_since_ = kTimeMax;
    std::vector<EmergencyDetector> detectors_;
};

/// Contention access (slotted CSMA/CA) for one node at a time per node id, confined to
/// contention periods supplied by the owning MAC.
class ContentionDriver {
public:
    struct Hooks {
        /// End of the contention period containing t, or nullopt if t is outside one.
        std::function<std::optional<SimTime>(SimTime)> period_end;
        /// Start of the next contention period after t; kTimeMax if none.
        std::function<SimTime(SimTime)> next_period;
        /// Called at transmission start (Transmit) or on AccessFailure.
        std::function<void(EntityId, MacAction)> on_result;
        /// Called when access cannot complete in the current period. Default: restart at
        /// the next period with the node asleep.
        std::function<void(EntityId)> on_defer;
        /// Radio state while counting down the back-off.
        RadioState backoff_state = RadioState::IdleListen;
    };

    ContentionDriver(World& w, Hooks hooks);

    void start(EntityId node, std::uint32_t w0);
    void cancel(EntityId node);
    bool busy(EntityId node) const { return nodes_.at(node).active; }

private:
    struct NodeState {
        std::optional<CsmaState> csma;
        Rng rng;
        bool active = false;
        std::uint32_t w0 = 1;
        EventHandle pending;
    };
    void arm(EntityId node);
    void defer(EntityId node);

    World& w_;
    Hooks hooks_;
    std::vector<NodeState> nodes_;
};

std::unique_ptr<Mac> make_ptdma(World& w);
std::unique_ptr<Mac> make_csma(World& w, MacKind kind);
std::unique_ptr<Mac> make_pbtdma(World& w);
std::unique_ptr<Mac> make_beacon154(World& w);

}  // namespace bsn::sim
