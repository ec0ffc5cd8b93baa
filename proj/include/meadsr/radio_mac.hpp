#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "meadsr/mobility.hpp"
#include "meadsr/packets.hpp"
#include "meadsr/sim_core.hpp"
#include "meadsr/trace.hpp"

namespace meadsr {

struct RadioConfig {
  double range = 250.0;       // meters, inclusive
  double bitrate = 2e6;       // bits/s
  double tx_power = 1.4;      // W
  double rx_power = 1.0;      // W
  std::size_t ifq_capacity = 50;
  int retry_limit = 4;
  SimTime slot = SimTime::from_micros(20);
  SimTime difs = SimTime::from_micros(50);
  int cw_min = 31;
  int cw_max = 1023;
  /// A unicast to an in-range receiver also silences the receiver's
  /// neighbors for its duration, the reservation an RTS/CTS exchange makes.
  bool reserve_receiver = true;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Airtime of a frame, rounded up to the next microsecond.
SimTime transmission_time(std::uint32_t bytes, double bitrate);

/// Energy drawn at `watts` for `duration`, in whole nanojoules (truncated).
Energy energy_for(double watts, SimTime duration);

/// Per-node residual and consumed energy. Residual never goes below zero;
/// a node whose residual reaches zero is dead.
class EnergyLedger {
 public:
  EnergyLedger(std::size_t nodes, Energy initial, double tx_power, double rx_power);

  /// Charges power(role) * duration, clamped to the residual. Returns the
  /// amount actually charged. Dead nodes are never charged.
  Energy charge(NodeId node, EnergyRole role, SimTime duration);

  std::size_t size() const { return residual_.size(); }
  Energy initial() const { return initial_; }
  Energy residual(NodeId n) const { return residual_.at(n); }
  Energy consumed_tx(NodeId n) const { return consumed_tx_.at(n); }
  Energy consumed_rx(NodeId n) const { return consumed_rx_.at(n); }
  Energy consumed(NodeId n) const { return consumed_tx_.at(n) + consumed_rx_.at(n); }
  bool alive(NodeId n) const { return residual_.at(n) > Energy{}; }

  std::vector<Energy> consumed_all() const;
  std::vector<Energy> residual_all() const { return residual_; }

 private:
  Energy initial_;
  double tx_power_;
  double rx_power_;
  std::vector<Energy> residual_;
  std::vector<Energy> consumed_tx_;
  std::vector<Energy> consumed_rx_;
};

/// Nodes other than `node` that are alive and within `range` (inclusive).
std::vector<NodeId> neighbors(std::span<const Vec2> positions, const std::vector<bool>& alive, NodeId node,
                              double range);

/// Bounded FIFO; control frames are queued ahead of data frames. The head
/// can be pinned while the MAC is working on it.
class InterfaceQueue {
 public:
  explicit InterfaceQueue(std::size_t capacity) : capacity_(capacity) {}

  /// False (frame not queued) when the queue is full.
  bool push(Frame frame, bool head_pinned);
  const Frame& front() const { return frames_.front(); }
  Frame pop_front();
  std::vector<Frame> clear();

  bool empty() const { return frames_.empty(); }
  std::size_t size() const { return frames_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::size_t data_frames() const;
  const std::deque<Frame>& frames() const { return frames_; }

 private:
  std::size_t capacity_;
  std::deque<Frame> frames_;
};

enum class EnqueueResult { kAccepted, kDroppedIfq, kNodeDead };

/// Shared medium with carrier sense, random backoff, collisions at common
/// receivers, optional receiver reservation for unicast, half-duplex radios and per-frame energy accounting. Every
/// in-range node pays reception energy for every frame it hears. Each node
/// draws its backoff slots from its own stream "mac-backoff/<id>".
class RadioMac {
 public:
  struct Hooks {
    /// Successful reception of a broadcast frame, or of a unicast addressed to `receiver`.
    std::function<void(NodeId receiver, const Frame&)> deliver;
    /// Unicast abandoned after `retry_limit` attempts.
    std::function<void(NodeId sender, Frame)> link_failed;
    std::function<void(NodeId)> node_died;
  };

  RadioMac(const RadioConfig& config, const MobilityScenario& mobility, Energy initial, EventQueue& events,
           std::uint64_t seed, TraceSink& trace, Hooks hooks);

  EnqueueResult enqueue_frame(NodeId node, Frame frame);

  std::size_t node_count() const { return nodes_.size(); }
  bool alive(NodeId n) const { return ledger_.alive(n); }
  std::vector<NodeId> neighbors(NodeId node);
  const EnergyLedger& ledger() const { return ledger_; }
  const RadioConfig& config() const { return config_; }
  std::size_t queue_depth(NodeId n) const { return nodes_.at(n).queue.size(); }
  /// DATA frames currently owned by the MAC layer (queued or on the air).
  std::size_t data_frames_held() const;
  std::size_t transmissions_started() const { return transmissions_started_; }

 private:
  enum class State { kIdle, kContending, kTransmitting };

  struct NodeMac {
    NodeMac(std::size_t cap, RngStream rng) : queue(cap), backoff(std::move(rng)) {}
    InterfaceQueue queue;
    RngStream backoff;
    State state = State::kIdle;
    std::optional<EventHandle> timer;
    int retries = 0;
    std::vector<std::uint64_t> incoming;
    std::optional<std::uint64_t> outgoing;
  };
  struct Reception {
    NodeId node;
    bool corrupted;
  };
  struct Transmission {
    NodeId sender;
    Frame frame;
    Vec2 sender_pos;
    /// Receiver position when the frame holds a reservation around it.
    std::optional<Vec2> reserved_at;
    SimTime end;
    std::vector<Reception> receptions;
  };

  const std::vector<Vec2>& positions();
  SimTime busy_until(NodeId node);
  void kick(NodeId node);
  void contend(NodeId node);
  void start_backoff(NodeId node);
  void backoff_expired(NodeId node);
  void start_transmission(NodeId node);
  void finish_transmission(std::uint64_t id);
  /// Returns false if the charge killed the node.
  bool charge(NodeId node, EnergyRole role, SimTime duration, const Frame& frame);
  void kill(NodeId node);
  void trace_frame(TraceAction action, NodeId node, const Frame& frame, std::optional<DropReason> reason = {});

  RadioConfig config_;
  const MobilityScenario& mobility_;
  EventQueue& events_;
  TraceSink& trace_;
  Hooks hooks_;
  EnergyLedger ledger_;
  std::vector<NodeMac> nodes_;
  std::map<std::uint64_t, Transmission> on_air_;
  std::uint64_t next_tx_id_ = 0;
  std::size_t transmissions_started_ = 0;
  std::vector<Vec2> position_cache_;
  std::optional<SimTime> position_cache_time_;
  double range_sq_;
};

}  // namespace meadsr
