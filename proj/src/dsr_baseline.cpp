#include "meadsr/dsr_baseline.hpp"

#include <algorithm>

namespace meadsr {

void DsrRouteCache::add(const Route& path) {
  if (path.size() < 2 || path.front() != owner_ || has_duplicates(path)) return;
  paths_.insert(path);
}

std::optional<Route> DsrRouteCache::lookup(NodeId dest) const {
  std::optional<Route> best;
  for (const Route& p : paths_) {
    auto it = std::find(p.begin() + 1, p.end(), dest);
    if (it == p.end()) continue;
    const auto len = static_cast<std::size_t>(it - p.begin()) + 1;
    if (best && (len > best->size() || (len == best->size() && !std::lexicographical_compare(
                                                                    p.begin(), it + 1, best->begin(), best->end())))) {
      continue;
    }
    best = Route(p.begin(), it + 1);
  }
  return best;
}

std::set<NodeId> DsrRouteCache::purge_link(Link link) {
  std::set<NodeId> affected;
  for (auto it = paths_.begin(); it != paths_.end();) {
    if (route_uses_link(*it, link)) {
      affected.insert(it->begin() + 1, it->end());
      it = paths_.erase(it);
    } else {
      ++it;
    }
  }
  return affected;
}

void DsrAgent::overhear_path(const Route& path, std::size_t self_index) {
  cache_.add(Route(path.begin() + static_cast<std::ptrdiff_t>(self_index), path.end()));
  cache_.add(Route(path.rbegin() + static_cast<std::ptrdiff_t>(path.size() - 1 - self_index), path.rend()));
}

void DsrAgent::handle_rreq(const Frame& frame, const RouteRequest& rreq) {
  const NodeId self = ctx_.self();
  last_action_ = DsrRreqAction::kDiscard;
  if (self == rreq.src || std::find(rreq.route.begin(), rreq.route.end(), self) != rreq.route.end()) return;

  Route so_far;
  so_far.reserve(rreq.route.size() + 2);
  so_far.push_back(rreq.src);
  so_far.insert(so_far.end(), rreq.route.begin(), rreq.route.end());
  so_far.push_back(self);
  cache_.add(Route(so_far.rbegin(), so_far.rend()));

  if (self == rreq.dest) {
    last_action_ = DsrRreqAction::kReplyAsDestination;
    reply(so_far, so_far.size() - 1, rreq.seq);
    return;
  }
  if (!seen_.insert({rreq.src, rreq.seq}).second) return;

  if (auto suffix = cache_.lookup(rreq.dest)) {
    Route full = so_far;
    full.insert(full.end(), suffix->begin() + 1, suffix->end());
    if (!has_duplicates(full)) {
      last_action_ = DsrRreqAction::kReplyFromCache;
      reply(full, so_far.size() - 1, rreq.seq);
      return;
    }
  }

  last_action_ = DsrRreqAction::kForward;
  RouteRequest out = rreq;
  out.route.push_back(self);
  const Payload payload = std::move(out);
  trace(TraceAction::kForward, PacketKind::kRreq, frame.uid, frame_size(payload));
  send_frame(kBroadcast, payload, frame.uid);
}

void DsrAgent::reply(const Route& path, std::size_t self_index, std::uint32_t seq) {
  RouteReply rrep;
  rrep.path = path;
  rrep.seq = seq;
  rrep.rank = 0;
  rrep.holder = self_index;
  if (probe_) probe_->rrep_sent(ctx_.self(), rrep);
  const NodeId next = path[self_index - 1];
  const std::uint64_t uid = ctx_.new_uid();
  const Payload payload = std::move(rrep);
  trace(TraceAction::kSend, PacketKind::kRrep, uid, frame_size(payload));
  send_frame(next, payload, uid);
}

void DsrAgent::handle_rrep_at_initiator(const RouteReply& rrep) {
  if (has_duplicates(rrep.path)) return;
  cache_.add(rrep.path);
  if (probe_) probe_->route_installed(ctx_.self(), rrep.path);
  route_available(rrep.target());
}

void DsrAgent::handle_data_link_failure(DataPacket pkt, NodeId next_hop) {
  const NodeId self = ctx_.self();
  report_link_break(pkt.path, pkt.holder, Link{self, next_hop});
  const bool salvaged_here =
      std::find(pkt.salvaged_at.begin(), pkt.salvaged_at.end(), self) != pkt.salvaged_at.end();
  if (pkt.salvage_count < params_.max_salvage && !salvaged_here) {
    if (auto route = cache_.lookup(pkt.dst)) {
      ++pkt.salvage_count;
      pkt.salvaged_at.push_back(self);
      send_on_route(std::move(pkt), *route);
      return;
    }
  }
  drop_data(pkt, DropReason::kTout);
}

}  // namespace meadsr
