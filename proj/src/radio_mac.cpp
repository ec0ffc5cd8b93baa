#include "meadsr/radio_mac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meadsr {

void RadioConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw std::invalid_argument(std::string("radio: ") + field + " must be > 0");
  };
  require(range > 0.0, "range");
  require(bitrate > 0.0, "bitrate");
  require(tx_power > 0.0, "tx_power");
  require(rx_power > 0.0, "rx_power");
  require(ifq_capacity > 0, "ifq_capacity");
  require(retry_limit > 0, "retry_limit");
  require(slot > SimTime{}, "slot");
  require(cw_min > 0 && cw_max >= cw_min, "cw_min/cw_max");
}

SimTime transmission_time(std::uint32_t bytes, double bitrate) {
  const double us = static_cast<double>(bytes) * 8.0 * 1e6 / bitrate;
  // Guard against 2127.9999999 style representation error before ceil.
  const double rounded = std::round(us);
  const double whole = std::abs(us - rounded) < 1e-6 ? rounded : std::ceil(us);
  return SimTime::from_micros(static_cast<std::int64_t>(whole));
}

Energy energy_for(double watts, SimTime duration) {
  const auto nanowatts = static_cast<__int128>(std::llround(watts * 1e9));
  return Energy::from_nanojoules(static_cast<std::int64_t>(nanowatts * duration.micros() / 1000000));
}

EnergyLedger::EnergyLedger(std::size_t nodes, Energy initial, double tx_power, double rx_power)
    : initial_(initial),
      tx_power_(tx_power),
      rx_power_(rx_power),
      residual_(nodes, initial),
      consumed_tx_(nodes),
      consumed_rx_(nodes) {}

Energy EnergyLedger::charge(NodeId node, EnergyRole role, SimTime duration) {
  if (duration < SimTime{}) throw std::invalid_argument("EnergyLedger::charge: negative duration");
  if (!alive(node)) return Energy{};
  Energy amount = energy_for(role == EnergyRole::kTx ? tx_power_ : rx_power_, duration);
  amount = std::min(amount, residual_[node]);
  residual_[node] -= amount;
  (role == EnergyRole::kTx ? consumed_tx_ : consumed_rx_)[node] += amount;
  return amount;
}

std::vector<Energy> EnergyLedger::consumed_all() const {
  std::vector<Energy> out(size());
  for (std::size_t n = 0; n < size(); ++n) out[n] = consumed(static_cast<NodeId>(n));
  return out;
}

std::vector<NodeId> neighbors(std::span<const Vec2> positions, const std::vector<bool>& alive, NodeId node,
                              double range) {
  std::vector<NodeId> out;
  if (!alive.at(node)) return out;
  const Vec2 me = positions[node];
  const double r2 = range * range;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (i == node || !alive[i]) continue;
    const double dx = positions[i].x - me.x;
    const double dy = positions[i].y - me.y;
    if (dx * dx + dy * dy <= r2) out.push_back(static_cast<NodeId>(i));
  }
  return out;
}

bool InterfaceQueue::push(Frame frame, bool head_pinned) {
  if (frames_.size() >= capacity_) return false;
  if (!frame.is_control()) {
    frames_.push_back(std::move(frame));
    return true;
  }
  auto pos = frames_.begin();
  if (head_pinned && pos != frames_.end()) ++pos;
  while (pos != frames_.end() && pos->is_control()) ++pos;
  frames_.insert(pos, std::move(frame));
  return true;
}

Frame InterfaceQueue::pop_front() {
  Frame f = std::move(frames_.front());
  frames_.pop_front();
  return f;
}

std::vector<Frame> InterfaceQueue::clear() {
  std::vector<Frame> out(std::make_move_iterator(frames_.begin()), std::make_move_iterator(frames_.end()));
  frames_.clear();
  return out;
}

std::size_t InterfaceQueue::data_frames() const {
  return static_cast<std::size_t>(
      std::count_if(frames_.begin(), frames_.end(), [](const Frame& f) { return !f.is_control(); }));
}

RadioMac::RadioMac(const RadioConfig& config, const MobilityScenario& mobility, Energy initial,
                   EventQueue& events, std::uint64_t seed, TraceSink& trace, Hooks hooks)
    : config_(config),
      mobility_(mobility),
      events_(events),
      trace_(trace),
      hooks_(std::move(hooks)),
      ledger_(mobility.node_count(), initial, config.tx_power, config.rx_power),
      range_sq_(config.range * config.range) {
  config_.validate();
  nodes_.reserve(mobility.node_count());
  for (std::size_t i = 0; i < mobility.node_count(); ++i) {
    nodes_.emplace_back(config_.ifq_capacity, RngStream(seed, "mac-backoff/" + std::to_string(i)));
  }
}

const std::vector<Vec2>& RadioMac::positions() {
  const SimTime now = events_.now();
  if (!position_cache_time_ || *position_cache_time_ != now) {
    position_cache_.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      position_cache_[i] = mobility_.position_at(static_cast<NodeId>(i), now);
    }
    position_cache_time_ = now;
  }
  return position_cache_;
}

std::vector<NodeId> RadioMac::neighbors(NodeId node) {
  std::vector<bool> alive(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) alive[i] = ledger_.alive(static_cast<NodeId>(i));
  return meadsr::neighbors(positions(), alive, node, config_.range);
}

std::size_t RadioMac::data_frames_held() const {
  std::size_t n = 0;
  for (const NodeMac& m : nodes_) n += m.queue.data_frames();
  return n;
}

void RadioMac::trace_frame(TraceAction action, NodeId node, const Frame& frame, std::optional<DropReason> reason) {
  TraceEvent ev;
  ev.time = events_.now();
  ev.action = action;
  ev.layer = TraceLayer::kMac;
  ev.node = node;
  ev.kind = frame.kind;
  ev.uid = frame.uid;
  ev.size = frame.size;
  ev.reason = reason;
  trace_.record(ev);
}

EnqueueResult RadioMac::enqueue_frame(NodeId node, Frame frame) {
  if (!ledger_.alive(node)) {
    trace_frame(TraceAction::kDrop, node, frame, DropReason::kNodeDead);
    return EnqueueResult::kNodeDead;
  }
  NodeMac& mac = nodes_.at(node);
  const bool pinned = mac.state != State::kIdle;
  if (!mac.queue.push(frame, pinned)) {
    trace_frame(TraceAction::kDrop, node, frame, DropReason::kIfq);
    return EnqueueResult::kDroppedIfq;
  }
  kick(node);
  return EnqueueResult::kAccepted;
}

SimTime RadioMac::busy_until(NodeId node) {
  const Vec2 me = positions()[node];
  SimTime until = events_.now();
  auto within = [&](Vec2 p) {
    const double dx = p.x - me.x;
    const double dy = p.y - me.y;
    return dx * dx + dy * dy <= range_sq_;
  };
  for (const auto& [id, tx] : on_air_) {
    if (tx.sender == node) continue;
    if (within(tx.sender_pos) || (tx.reserved_at && within(*tx.reserved_at))) until = std::max(until, tx.end);
  }
  return until;
}

void RadioMac::kick(NodeId node) {
  NodeMac& mac = nodes_[node];
  if (mac.state != State::kIdle || mac.queue.empty() || !ledger_.alive(node)) return;
  mac.state = State::kContending;
  contend(node);
}

void RadioMac::contend(NodeId node) {
  const SimTime until = busy_until(node);
  if (until > events_.now()) {
    nodes_[node].timer = events_.schedule(until, [this, node] { start_backoff(node); });
  } else {
    start_backoff(node);
  }
}

void RadioMac::start_backoff(NodeId node) {
  NodeMac& mac = nodes_[node];
  const int cw = std::min(config_.cw_max, ((config_.cw_min + 1) << std::min(mac.retries, 10)) - 1);
  const std::int64_t slots = mac.backoff.uniform_int(0, cw);
  const SimTime wait = config_.difs + SimTime::from_micros(slots * config_.slot.micros());
  mac.timer = events_.schedule_after(wait, [this, node] { backoff_expired(node); });
}

void RadioMac::backoff_expired(NodeId node) {
  nodes_[node].timer.reset();
  if (!ledger_.alive(node)) return;
  const SimTime until = busy_until(node);
  if (until > events_.now()) {
    nodes_[node].timer = events_.schedule(until, [this, node] { start_backoff(node); });
    return;
  }
  start_transmission(node);
}

bool RadioMac::charge(NodeId node, EnergyRole role, SimTime duration, const Frame& frame) {
  const Energy amount = ledger_.charge(node, role, duration);
  TraceEvent ev;
  ev.time = events_.now();
  ev.action = TraceAction::kEnergy;
  ev.layer = TraceLayer::kMac;
  ev.node = node;
  ev.kind = frame.kind;
  ev.uid = frame.uid;
  ev.size = frame.size;
  ev.role = role;
  ev.energy = amount;
  trace_.record(ev);
  if (!ledger_.alive(node)) {
    kill(node);
    return false;
  }
  return true;
}

void RadioMac::kill(NodeId node) {
  NodeMac& mac = nodes_[node];
  if (mac.timer) {
    events_.cancel(*mac.timer);
    mac.timer.reset();
  }
  mac.state = State::kIdle;
  mac.retries = 0;
  for (Frame& f : mac.queue.clear()) trace_frame(TraceAction::kDrop, node, f, DropReason::kNodeDead);
  if (hooks_.node_died) hooks_.node_died(node);
}

void RadioMac::start_transmission(NodeId node) {
  NodeMac& mac = nodes_[node];
  const Frame frame = mac.queue.front();
  const SimTime duration = transmission_time(frame.size, config_.bitrate);
  ++transmissions_started_;
  if (!charge(node, EnergyRole::kTx, duration, frame)) return;
  trace_frame(TraceAction::kSend, node, frame);

  const std::uint64_t id = next_tx_id_++;
  const std::vector<Vec2>& pos = positions();
  Transmission tx{node, frame, pos[node], std::nullopt, events_.now() + duration, {}};
  if (config_.reserve_receiver && !frame.is_broadcast() && frame.link_dst < nodes_.size() &&
      ledger_.alive(frame.link_dst)) {
    const Vec2 to = pos[frame.link_dst];
    const double dx = to.x - tx.sender_pos.x;
    const double dy = to.y - tx.sender_pos.y;
    if (dx * dx + dy * dy <= range_sq_) tx.reserved_at = to;
  }

  // A node that starts sending loses whatever it was receiving.
  for (std::uint64_t in : mac.incoming) {
    for (Reception& r : on_air_.at(in).receptions) {
      if (r.node == node) r.corrupted = true;
    }
  }

  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto r = static_cast<NodeId>(i);
    if (r == node || !ledger_.alive(r)) continue;
    const double dx = pos[i].x - tx.sender_pos.x;
    const double dy = pos[i].y - tx.sender_pos.y;
    if (dx * dx + dy * dy > range_sq_) continue;
    if (!charge(r, EnergyRole::kRx, duration, frame)) continue;
    NodeMac& rx = nodes_[r];
    bool corrupted = rx.outgoing.has_value();
    if (!rx.incoming.empty()) {
      corrupted = true;
      for (std::uint64_t in : rx.incoming) {
        for (Reception& other : on_air_.at(in).receptions) {
          if (other.node == r) other.corrupted = true;
        }
      }
    }
    rx.incoming.push_back(id);
    tx.receptions.push_back(Reception{r, corrupted});
  }

  mac.state = State::kTransmitting;
  mac.outgoing = id;
  on_air_.emplace(id, std::move(tx));
  events_.schedule(events_.now() + duration, [this, id] { finish_transmission(id); });
}

void RadioMac::finish_transmission(std::uint64_t id) {
  auto it = on_air_.find(id);
  Transmission tx = std::move(it->second);
  on_air_.erase(it);
  for (const Reception& r : tx.receptions) {
    auto& in = nodes_[r.node].incoming;
    in.erase(std::remove(in.begin(), in.end(), id), in.end());
  }

  NodeMac& mac = nodes_[tx.sender];
  mac.outgoing.reset();
  // The sender may have died while on the air (reception charges); its queue is already gone.
  if (!ledger_.alive(tx.sender)) return;
  mac.state = State::kIdle;

  std::vector<NodeId> receivers;
  bool delivered = false;
  for (const Reception& r : tx.receptions) {
    if (!ledger_.alive(r.node)) continue;
    if (r.corrupted) {
      if (tx.frame.is_broadcast()) trace_frame(TraceAction::kDrop, r.node, tx.frame, DropReason::kCollision);
      continue;
    }
    if (tx.frame.is_broadcast() || r.node == tx.frame.link_dst) {
      receivers.push_back(r.node);
      delivered = true;
    }
  }

  std::optional<Frame> failed;
  if (tx.frame.is_broadcast() || delivered) {
    mac.queue.pop_front();
    mac.retries = 0;
  } else if (++mac.retries >= config_.retry_limit) {
    failed = mac.queue.pop_front();
    mac.retries = 0;
  }

  for (NodeId r : receivers) {
    trace_frame(TraceAction::kRecv, r, tx.frame);
    if (hooks_.deliver && ledger_.alive(r)) hooks_.deliver(r, tx.frame);
  }
  if (failed && hooks_.link_failed) hooks_.link_failed(tx.sender, std::move(*failed));
  kick(tx.sender);
}

}  // namespace meadsr
