#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "msssn/packet.hpp"
#include "msssn/radio/channel.hpp"
#include "msssn/sim/simulator.hpp"
#include "msssn/world/geometry.hpp"
#include "msssn/world/world.hpp"

namespace msssn::radio {

using Address = std::int32_t;
inline constexpr Address kBroadcast = -1;

/// Sensors occupy addresses [0, n_sensors), sinks follow in id order.
struct AddressBook {
    std::int32_t n_sensors = 0;

    [[nodiscard]] Address sensor(NodeId id) const { return id; }
    [[nodiscard]] Address sink(NodeId id) const { return n_sensors + id; }
    [[nodiscard]] bool is_sink(Address a) const { return a >= n_sensors; }
    [[nodiscard]] NodeId sink_id(Address a) const { return a - n_sensors; }
};

struct Verdict {
    Address receiver;
    bool delivered;
};

struct TxResult {
    std::uint64_t tx_id = 0;
    Address src = 0;
    Address dest = kBroadcast;
    int channel = 0;
    double bits = 0.0;
    double start = 0.0;
    double end = 0.0;
    bool aborted = false;
    bool dest_delivered = false;
    std::vector<Verdict> verdicts;  // ascending receiver address
};

enum class ActivityKind : std::uint8_t { tx, rx, switching };

struct ActivityInterval {
    double start;
    double end;
    ActivityKind kind;
    int channel;
    double latency;  // switching only: the configured latency applied
};

/// Shared wireless medium with unit-disk propagation, per-channel overlap
/// collisions and one half-duplex transceiver per node.
///
/// A receiver locks onto a transmission that starts while it is alive,
/// tuned to that channel, not switching and not transmitting. The copy is
/// delivered iff no other same-channel transmission covering the receiver
/// overlaps it in time and the receiver stays tuned until the end.
class Medium {
public:
    using EnergyHook = std::function<bool(Address, double bits, double distance, RadioMode, double now)>;
    using ReceiveHandler = std::function<void(Address receiver, const Packet&, Address from)>;
    using DoneCallback = std::function<void(const TxResult&)>;
    using TxObserver = std::function<void(const TxResult&)>;

    Medium(sim::Simulator& sim, MacConfig cfg);

    Address add_node(NodeRole role, Position pos, double tx_range, int channel);
    [[nodiscard]] std::size_t size() const { return nodes_.size(); }

    void set_position(Address a, Position p) { node(a).pos = p; }
    [[nodiscard]] Position position(Address a) const { return node(a).pos; }
    [[nodiscard]] double tx_range(Address a) const { return node(a).tx_range; }
    [[nodiscard]] NodeRole role(Address a) const { return node(a).role; }
    [[nodiscard]] bool alive(Address a) const { return node(a).alive; }
    /// Kills a node: its receptions are aborted and an in-flight transmission
    /// is cut off (no receiver gets it).
    void kill(Address a);

    /// Charges tx/rx energy. Returns false when the drain killed the node.
    void set_energy_hook(EnergyHook hook) { energy_hook_ = std::move(hook); }
    /// Invoked for the addressee of a delivered unicast, or for every
    /// delivered receiver of a broadcast.
    void set_receive_handler(ReceiveHandler h) { receive_ = std::move(h); }
    void set_tx_observer(TxObserver o) { observer_ = std::move(o); }

    /// Alive nodes currently tuned to `channel` within a's tx range.
    [[nodiscard]] std::vector<Address> neighbors(Address a, int channel) const;

    /// Starts a transmission now. Throws NodeDead, WrongChannel (not tuned
    /// or mid-switch) or Busy (already transmitting or receiving).
    std::uint64_t transmit(Address src, Packet packet, int channel, Address dest, DoneCallback done);

    /// Retunes a node. Already tuned: returns now at no cost. Otherwise the
    /// node is deaf until the returned ready time. Throws Busy mid-transmission
    /// or while a switch to another channel is still in progress.
    double switch_channel(Address a, int channel);

    [[nodiscard]] int channel(Address a) const { return node(a).channel; }
    [[nodiscard]] bool is_tuned(Address a, int channel) const;
    [[nodiscard]] double ready_time(Address a) const { return node(a).deaf_until; }
    [[nodiscard]] bool transmitting(Address a) const { return node(a).tx_id != 0; }
    [[nodiscard]] bool receiving(Address a) const { return !node(a).incoming.empty(); }
    /// Time at which every reception currently in progress at `a` ends.
    [[nodiscard]] double rx_busy_until(Address a) const;

    void enable_activity_log(bool on) { log_activity_ = on; }
    [[nodiscard]] const std::vector<ActivityInterval>& activity(Address a) const { return node(a).activity; }

    /// Per-transmission JSONL records: time, src, channel, bits, verdicts.
    void set_trace(std::ostream* out) { trace_ = out; }

    [[nodiscard]] const MacConfig& config() const { return cfg_; }
    [[nodiscard]] sim::Simulator& simulator() { return sim_; }

private:
    struct Reception {
        std::uint64_t tx_id;
        double start;
        bool corrupted;
        bool aborted;
    };
    struct Node {
        NodeRole role;
        Position pos;
        double tx_range;
        int channel;
        bool alive = true;
        double deaf_until = 0.0;
        std::uint64_t tx_id = 0;  // 0 = idle
        std::vector<Reception> incoming;
        std::vector<ActivityInterval> activity;
    };
    struct ActiveTx {
        std::uint64_t id;
        Address src;
        Address dest;
        int channel;
        Position origin;
        double range;
        double start;
        double end;
        bool aborted = false;
        Packet packet;
        std::vector<Address> receivers;
        DoneCallback done;
    };

    Node& node(Address a) { return nodes_.at(static_cast<std::size_t>(a)); }
    [[nodiscard]] const Node& node(Address a) const { return nodes_.at(static_cast<std::size_t>(a)); }
    ActiveTx* find_tx(std::uint64_t id);
    void finish(std::uint64_t id);
    void abort_receptions(Address a, double now);
    void write_trace(const TxResult& r);

    sim::Simulator& sim_;
    MacConfig cfg_;
    std::vector<Node> nodes_;
    std::vector<ActiveTx> active_;
    std::uint64_t next_tx_id_ = 1;
    EnergyHook energy_hook_;
    ReceiveHandler receive_;
    TxObserver observer_;
    bool log_activity_ = false;
    std::ostream* trace_ = nullptr;
};

}  // namespace msssn::radio
