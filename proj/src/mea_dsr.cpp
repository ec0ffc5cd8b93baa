#include "meadsr/mea_dsr.hpp"

#include <algorithm>

namespace meadsr {

std::string_view to_string(RreqVerdict v) {
  switch (v) {
    case RreqVerdict::kForward: return "forward";
    case RreqVerdict::kDiscardLoop: return "discard-loop";
    case RreqVerdict::kDiscardStale: return "discard-stale";
    case RreqVerdict::kDiscardSameLink: return "discard-same-link";
    case RreqVerdict::kDiscardLonger: return "discard-longer";
    case RreqVerdict::kDiscardCopyCap: return "discard-copy-cap";
  }
  return "?";
}

NodeId arriving_link(const RouteRequest& rreq) { return rreq.route.empty() ? rreq.src : rreq.route.back(); }

RreqVerdict duplicate_forward_decision(const RequestTableEntry* entry, const RouteRequest& rreq, NodeId self) {
  if (self == rreq.src || std::find(rreq.route.begin(), rreq.route.end(), self) != rreq.route.end()) {
    return RreqVerdict::kDiscardLoop;
  }
  if (entry == nullptr || rreq.seq > entry->seq) return RreqVerdict::kForward;
  if (rreq.seq < entry->seq) return RreqVerdict::kDiscardStale;
  const NodeId link = arriving_link(rreq);
  if (std::find(entry->last_nodes.begin(), entry->last_nodes.end(), link) != entry->last_nodes.end()) {
    return RreqVerdict::kDiscardSameLink;
  }
  if (rreq.route.size() > entry->nb_hops) return RreqVerdict::kDiscardLonger;
  if (entry->nb_copies >= 2) return RreqVerdict::kDiscardCopyCap;
  return RreqVerdict::kForward;
}

RouteRequest update_min_bat_lev(RouteRequest rreq, Energy residual) {
  if (!rreq.min_bat_lev || residual < *rreq.min_bat_lev) rreq.min_bat_lev = residual;
  return rreq;
}

const RequestTableEntry* RequestTable::find(NodeId src) const {
  auto it = entries_.find(src);
  return it == entries_.end() ? nullptr : &it->second;
}

void RequestTable::record_forward(const RouteRequest& rreq) {
  auto it = entries_.find(rreq.src);
  if (it == entries_.end() || rreq.seq > it->second.seq) {
    entries_[rreq.src] = RequestTableEntry{rreq.src, rreq.seq, rreq.route.size(), {arriving_link(rreq)}, 1};
    return;
  }
  it->second.last_nodes.push_back(arriving_link(rreq));
  ++it->second.nb_copies;
}

bool RouteTable::insert(NodeId src, std::uint32_t seq, RouteCandidate candidate) {
  auto it = rounds_.find(src);
  if (it != rounds_.end() && seq < it->second.seq) return false;
  if (it == rounds_.end() || seq > it->second.seq) {
    rounds_[src] = Round{seq, {std::move(candidate)}, false};
    return true;
  }
  it->second.candidates.push_back(std::move(candidate));
  return false;
}

std::vector<RouteCandidate> RouteTable::candidates(NodeId src, std::uint32_t seq) const {
  auto it = rounds_.find(src);
  if (it == rounds_.end() || it->second.seq != seq) return {};
  return it->second.candidates;
}

bool RouteTable::mark_replied(NodeId src, std::uint32_t seq) {
  auto it = rounds_.find(src);
  if (it == rounds_.end() || it->second.seq != seq || it->second.replied) return false;
  it->second.replied = true;
  return true;
}

void MeaRouteCache::install(const Route& route, Slot slot) {
  Entry& e = entries_[route.back()];
  (slot == Slot::kPrimary ? e.primary : e.alternate) = route;
}

std::optional<Route> MeaRouteCache::lookup(NodeId dest) const {
  auto it = entries_.find(dest);
  if (it == entries_.end()) return std::nullopt;
  return it->second.primary ? it->second.primary : it->second.alternate;
}

std::optional<Route> MeaRouteCache::get(NodeId dest, Slot slot) const {
  auto it = entries_.find(dest);
  if (it == entries_.end()) return std::nullopt;
  return slot == Slot::kPrimary ? it->second.primary : it->second.alternate;
}

std::set<NodeId> MeaRouteCache::purge_link(Link link) {
  std::set<NodeId> affected;
  for (auto it = entries_.begin(); it != entries_.end();) {
    Entry& e = it->second;
    for (auto* slot : {&e.primary, &e.alternate}) {
      if (*slot && route_uses_link(**slot, link)) {
        slot->reset();
        affected.insert(it->first);
      }
    }
    it = (!e.primary && !e.alternate) ? entries_.erase(it) : std::next(it);
  }
  return affected;
}

std::vector<Route> MeaRouteCache::all_routes() const {
  std::vector<Route> out;
  for (const auto& [dest, e] : entries_) {
    if (e.primary) out.push_back(*e.primary);
    if (e.alternate) out.push_back(*e.alternate);
  }
  return out;
}

void MeaDsrAgent::handle_rreq(const Frame& frame, const RouteRequest& rreq) {
  const NodeId self = ctx_.self();
  if (self == rreq.dest) {
    if (rreq.src == self || has_duplicates(rreq.route)) return;
    if (probe_) probe_->rreq_at_destination(self, rreq);
    const NodeId src = rreq.src;
    const std::uint32_t seq = rreq.seq;
    if (route_table_.insert(src, seq, RouteCandidate{rreq.route, rreq.min_bat_lev, ctx_.now()})) {
      ctx_.schedule_after(params_.wait_time, [this, src, seq] { wait_time_expired(src, seq); });
    }
    return;
  }

  const RequestTableEntry* entry = request_table_.find(rreq.src);
  if (duplicate_forward_decision(entry, rreq, self) != RreqVerdict::kForward) return;
  const bool same_round = entry != nullptr && entry->seq == rreq.seq;
  const std::size_t first_copy_hops = same_round ? entry->nb_hops : rreq.route.size();
  request_table_.record_forward(rreq);

  const Energy residual = ctx_.residual_energy();
  RouteRequest out = update_min_bat_lev(rreq, residual);
  out.route.push_back(self);
  if (probe_) probe_->rreq_forwarded(self, rreq, out, residual, first_copy_hops);
  const Payload payload = std::move(out);
  trace(TraceAction::kForward, PacketKind::kRreq, frame.uid, frame_size(payload));
  send_frame(kBroadcast, payload, frame.uid);
}

void MeaDsrAgent::wait_time_expired(NodeId src, std::uint32_t seq) {
  const std::vector<RouteCandidate> cands = route_table_.candidates(src, seq);
  if (cands.empty() || !route_table_.mark_replied(src, seq)) return;
  const std::size_t primary = select_primary_route(cands);
  const std::optional<std::size_t> alternate = select_alternate_route(cands, primary);
  if (probe_) probe_->routes_selected(ctx_.self(), src, seq, cands, primary, alternate);
  send_rrep(src, seq, cands[primary], 0);
  if (alternate) send_rrep(src, seq, cands[*alternate], 1);
}

void MeaDsrAgent::send_rrep(NodeId src, std::uint32_t seq, const RouteCandidate& c, std::uint8_t rank) {
  RouteReply rrep;
  rrep.path = complete_path(src, c, ctx_.self());
  rrep.seq = seq;
  rrep.rank = rank;
  rrep.holder = rrep.path.size() - 1;
  if (probe_) probe_->rrep_sent(ctx_.self(), rrep);
  const NodeId next = rrep.path[rrep.holder - 1];
  const std::uint64_t uid = ctx_.new_uid();
  const Payload payload = std::move(rrep);
  trace(TraceAction::kSend, PacketKind::kRrep, uid, frame_size(payload));
  send_frame(next, payload, uid);
}

void MeaDsrAgent::handle_rrep_at_initiator(const RouteReply& rrep) {
  const NodeId dest = rrep.target();
  auto it = last_seq_.find(dest);
  if (it == last_seq_.end() || it->second != rrep.seq || has_duplicates(rrep.path)) return;
  cache_.install(rrep.path, rrep.rank == 0 ? MeaRouteCache::Slot::kPrimary : MeaRouteCache::Slot::kAlternate);
  if (probe_) probe_->route_installed(ctx_.self(), rrep.path);
  route_available(dest);
}

void MeaDsrAgent::handle_data_link_failure(DataPacket pkt, NodeId next_hop) {
  // No salvaging: intermediate nodes never reroute from their own caches.
  drop_data(pkt, DropReason::kTout);
  report_link_break(pkt.path, pkt.holder, Link{ctx_.self(), next_hop});
}

}  // namespace meadsr
