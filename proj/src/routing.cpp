#include "meadsr/routing.hpp"

#include <algorithm>

namespace meadsr {

std::optional<DataPacket> SendBuffer::push(DataPacket pkt) {
  auto& q = queues_[pkt.dst];
  std::optional<DataPacket> evicted;
  if (q.size() >= capacity_) {
    evicted = std::move(q.front());
    q.pop_front();
  }
  q.push_back(std::move(pkt));
  return evicted;
}

std::vector<DataPacket> SendBuffer::take(NodeId dest) {
  std::vector<DataPacket> out;
  auto it = queues_.find(dest);
  if (it == queues_.end()) return out;
  out.assign(std::make_move_iterator(it->second.begin()), std::make_move_iterator(it->second.end()));
  queues_.erase(it);
  return out;
}

std::optional<DataPacket> SendBuffer::remove(NodeId dest, std::uint64_t uid) {
  auto it = queues_.find(dest);
  if (it == queues_.end()) return std::nullopt;
  auto& q = it->second;
  auto pos = std::find_if(q.begin(), q.end(), [uid](const DataPacket& p) { return p.uid == uid; });
  if (pos == q.end()) return std::nullopt;
  DataPacket pkt = std::move(*pos);
  q.erase(pos);
  if (q.empty()) queues_.erase(it);
  return pkt;
}

std::vector<DataPacket> SendBuffer::clear() {
  std::vector<DataPacket> out;
  for (auto& [dest, q] : queues_) {
    for (auto& p : q) out.push_back(std::move(p));
  }
  queues_.clear();
  return out;
}

std::size_t SendBuffer::size(NodeId dest) const {
  auto it = queues_.find(dest);
  return it == queues_.end() ? 0 : it->second.size();
}

std::size_t SendBuffer::total() const {
  std::size_t n = 0;
  for (const auto& [dest, q] : queues_) n += q.size();
  return n;
}

SourceRoutingAgent::SourceRoutingAgent(NodeContext& ctx, RoutingParams params, ProtocolProbe* probe)
    : ctx_(ctx), params_(params), probe_(probe), buffer_(params.send_buffer_capacity) {}

bool SourceRoutingAgent::discovery_pending(NodeId dest) const { return discoveries_.count(dest) != 0; }

void SourceRoutingAgent::trace(TraceAction action, PacketKind kind, std::uint64_t uid, std::uint32_t size,
                               std::optional<DropReason> reason) {
  TraceEvent ev;
  ev.time = ctx_.now();
  ev.action = action;
  ev.layer = TraceLayer::kRtr;
  ev.node = ctx_.self();
  ev.kind = kind;
  ev.uid = uid;
  ev.size = size;
  ev.reason = reason;
  ctx_.record(ev);
}

void SourceRoutingAgent::send_frame(NodeId link_dst, Payload payload, std::uint64_t uid) {
  Frame f;
  f.kind = kind_of(payload);
  f.link_src = ctx_.self();
  f.link_dst = link_dst;
  f.size = frame_size(payload);
  f.uid = uid;
  f.payload = std::move(payload);
  ctx_.transmit(std::move(f));
}

void SourceRoutingAgent::drop_data(const DataPacket& pkt, DropReason reason) {
  trace(TraceAction::kDrop, PacketKind::kData, pkt.uid, pkt.payload_bytes, reason);
}

void SourceRoutingAgent::originate_data(DataPacket pkt) {
  if (dead_) return;
  active_destinations_.insert(pkt.dst);
  if (auto route = route_to(pkt.dst)) {
    send_on_route(std::move(pkt), *route);
    return;
  }
  const NodeId dst = pkt.dst;
  buffer_packet(std::move(pkt));
  start_discovery(dst);
}

void SourceRoutingAgent::buffer_packet(DataPacket pkt) {
  const NodeId dst = pkt.dst;
  const std::uint64_t uid = pkt.uid;
  if (auto evicted = buffer_.push(std::move(pkt))) drop_data(*evicted, DropReason::kNrte);
  ctx_.schedule_after(params_.send_buffer_timeout, [this, dst, uid] {
    if (auto expired = buffer_.remove(dst, uid)) drop_data(*expired, DropReason::kNrte);
  });
}

void SourceRoutingAgent::start_discovery(NodeId dest) {
  if (dead_ || discoveries_.count(dest) != 0) return;
  Discovery& d = discoveries_[dest];
  d.backoff = params_.discovery_backoff_initial;
  send_rreq(dest);
  d.timer = ctx_.schedule_after(d.backoff, [this, dest] { discovery_timeout(dest); });
}

void SourceRoutingAgent::send_rreq(NodeId dest) {
  RouteRequest rreq;
  rreq.src = ctx_.self();
  rreq.dest = dest;
  rreq.seq = ++seq_;
  last_seq_[dest] = rreq.seq;
  const std::uint64_t uid = ctx_.new_uid();
  const Payload payload = rreq;
  trace(TraceAction::kSend, PacketKind::kRreq, uid, frame_size(payload));
  send_frame(kBroadcast, payload, uid);
}

void SourceRoutingAgent::discovery_timeout(NodeId dest) {
  auto it = discoveries_.find(dest);
  if (it == discoveries_.end()) return;
  it->second.timer.reset();
  if (route_to(dest) || buffer_.size(dest) == 0) {
    discoveries_.erase(it);
    return;
  }
  Discovery& d = it->second;
  d.backoff = std::min(d.backoff + d.backoff, params_.discovery_backoff_max);
  send_rreq(dest);
  d.timer = ctx_.schedule_after(d.backoff, [this, dest] { discovery_timeout(dest); });
}

void SourceRoutingAgent::route_available(NodeId dest) {
  if (auto it = discoveries_.find(dest); it != discoveries_.end()) {
    if (it->second.timer) ctx_.cancel(*it->second.timer);
    discoveries_.erase(it);
  }
  for (DataPacket& pkt : buffer_.take(dest)) {
    if (auto route = route_to(dest)) {
      send_on_route(std::move(pkt), *route);
    } else {
      buffer_packet(std::move(pkt));
    }
  }
}

void SourceRoutingAgent::send_on_route(DataPacket pkt, const Route& route) {
  pkt.path = route;
  pkt.holder = 0;
  const NodeId next = route.at(1);
  const std::uint64_t uid = pkt.uid;
  send_frame(next, std::move(pkt), uid);
}

void SourceRoutingAgent::receive(const Frame& frame) {
  if (dead_) return;
  switch (frame.kind) {
    case PacketKind::kData: {
      DataPacket pkt = std::get<DataPacket>(frame.payload);
      const std::size_t me = pkt.holder + 1;
      if (me >= pkt.path.size() || pkt.path[me] != ctx_.self()) return;
      pkt.holder = me;
      overhear_path(pkt.path, me);
      if (me + 1 == pkt.path.size()) {
        ctx_.deliver_to_app(pkt);
      } else {
        forward_data(std::move(pkt));
      }
      break;
    }
    case PacketKind::kRreq:
      handle_rreq(frame, std::get<RouteRequest>(frame.payload));
      break;
    case PacketKind::kRrep: {
      RouteReply rrep = std::get<RouteReply>(frame.payload);
      if (rrep.holder == 0 || rrep.path[rrep.holder - 1] != ctx_.self()) return;
      rrep.holder -= 1;
      if (rrep.holder == 0) {
        handle_rrep_at_initiator(rrep);
      } else {
        overhear_path(rrep.path, rrep.holder);
        forward_rrep(std::move(rrep), frame.uid);
      }
      break;
    }
    case PacketKind::kRerr: {
      RouteError rerr = std::get<RouteError>(frame.payload);
      const std::size_t me = rerr.holder + 1;
      if (me >= rerr.path.size() || rerr.path[me] != ctx_.self()) return;
      rerr.holder = me;
      process_rerr(std::move(rerr), frame.uid);
      break;
    }
  }
}

void SourceRoutingAgent::forward_data(DataPacket pkt) {
  if (--pkt.ttl <= 0) {
    drop_data(pkt, DropReason::kTtl);
    return;
  }
  trace(TraceAction::kForward, PacketKind::kData, pkt.uid, pkt.payload_bytes);
  const NodeId next = pkt.path[pkt.holder + 1];
  const std::uint64_t uid = pkt.uid;
  send_frame(next, std::move(pkt), uid);
}

void SourceRoutingAgent::forward_rrep(RouteReply rrep, std::uint64_t uid) {
  const NodeId next = rrep.path[rrep.holder - 1];
  const Payload payload = std::move(rrep);
  trace(TraceAction::kForward, PacketKind::kRrep, uid, frame_size(payload));
  send_frame(next, payload, uid);
}

void SourceRoutingAgent::process_rerr(RouteError rerr, std::uint64_t uid) {
  const std::set<NodeId> affected = purge_link(rerr.broken);
  if (probe_) probe_->rerr_processed(ctx_.self(), rerr.broken, cached_routes());
  if (rerr.holder + 1 == rerr.path.size()) {
    source_lost_routes(affected);
    return;
  }
  const NodeId next = rerr.path[rerr.holder + 1];
  const Payload payload = std::move(rerr);
  trace(TraceAction::kForward, PacketKind::kRerr, uid, frame_size(payload));
  send_frame(next, payload, uid);
}

void SourceRoutingAgent::report_link_break(const Route& path, std::size_t self_index, Link link) {
  if (self_index == 0) return;
  RouteError rerr;
  rerr.reporter = ctx_.self();
  rerr.broken = link;
  rerr.path.assign(path.rbegin() + static_cast<std::ptrdiff_t>(path.size() - 1 - self_index), path.rend());
  rerr.holder = 0;
  const NodeId next = rerr.path[1];
  const std::uint64_t uid = ctx_.new_uid();
  const Payload payload = std::move(rerr);
  trace(TraceAction::kSend, PacketKind::kRerr, uid, frame_size(payload));
  send_frame(next, payload, uid);
}

void SourceRoutingAgent::link_failed(Frame frame) {
  if (dead_) return;
  const Link link{ctx_.self(), frame.link_dst};
  const std::set<NodeId> affected = purge_link(link);
  if (probe_) probe_->rerr_processed(ctx_.self(), link, cached_routes());
  if (frame.kind == PacketKind::kData) {
    handle_data_link_failure(std::get<DataPacket>(std::move(frame.payload)), frame.link_dst);
  }
  source_lost_routes(affected);
}

void SourceRoutingAgent::source_lost_routes(const std::set<NodeId>& affected) {
  for (NodeId d : affected) {
    if (active_destinations_.count(d) != 0 && !route_to(d)) start_discovery(d);
  }
}

void SourceRoutingAgent::shutdown() {
  if (dead_) return;
  dead_ = true;
  for (auto& [dest, d] : discoveries_) {
    if (d.timer) ctx_.cancel(*d.timer);
  }
  discoveries_.clear();
  for (const DataPacket& pkt : buffer_.clear()) drop_data(pkt, DropReason::kNodeDead);
}

}  // namespace meadsr
