#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <vector>

#include "meadsr/packets.hpp"
#include "meadsr/route_selection.hpp"
#include "meadsr/routing.hpp"

namespace meadsr {

/// Duplicate-suppression state for the latest discovery seen from one source.
struct RequestTableEntry {
  NodeId src = 0;
  std::uint32_t seq = 0;
  /// Route length of the first accepted copy.
  std::size_t nb_hops = 0;
  /// Arriving neighbor of each forwarded copy.
  std::vector<NodeId> last_nodes;
  int nb_copies = 0;
};

enum class RreqVerdict {
  kForward,
  kDiscardLoop,      // this node is already on the route (or is its source)
  kDiscardStale,     // older sequence number than the table
  kDiscardSameLink,  // same seq, arrived from a neighbor already used
  kDiscardLonger,    // same seq, different link, longer than the first copy
  kDiscardCopyCap,   // same seq, two copies already forwarded
};

std::string_view to_string(RreqVerdict v);

/// The neighbor that delivered `rreq`: the last route entry, or the source.
NodeId arriving_link(const RouteRequest& rreq);

/// Intermediate-node forwarding rule for a RREQ copy. `entry` is the table
/// entry for rreq.src, if any.
RreqVerdict duplicate_forward_decision(const RequestTableEntry* entry, const RouteRequest& rreq, NodeId self);

/// Stamps the forwarder's residual energy: the first forwarder overwrites the
/// unset field, later ones keep the minimum.
RouteRequest update_min_bat_lev(RouteRequest rreq, Energy residual);

class RequestTable {
 public:
  const RequestTableEntry* find(NodeId src) const;
  /// Records a copy that is about to be forwarded.
  void record_forward(const RouteRequest& rreq);

 private:
  std::map<NodeId, RequestTableEntry> entries_;
};

/// Destination-side store of candidate routes, one discovery round per source.
class RouteTable {
 public:
  /// Stores the candidate. Returns true if it is the first copy of (src, seq),
  /// i.e. the wait timer should start. Older rounds for src are purged; copies
  /// of an older seq than the stored one are ignored.
  bool insert(NodeId src, std::uint32_t seq, RouteCandidate candidate);
  /// Candidates for (src, seq); empty if the round is unknown or purged.
  std::vector<RouteCandidate> candidates(NodeId src, std::uint32_t seq) const;
  /// Marks the round answered; returns false if it already was.
  bool mark_replied(NodeId src, std::uint32_t seq);

 private:
  struct Round {
    std::uint32_t seq = 0;
    std::vector<RouteCandidate> candidates;
    bool replied = false;
  };
  std::map<NodeId, Round> rounds_;
};

/// Source-side cache: at most a primary and an alternate route per destination.
class MeaRouteCache {
 public:
  enum class Slot : std::uint8_t { kPrimary = 0, kAlternate = 1 };

  void install(const Route& route, Slot slot);
  /// Primary if present, else alternate.
  std::optional<Route> lookup(NodeId dest) const;
  std::optional<Route> get(NodeId dest, Slot slot) const;
  std::set<NodeId> purge_link(Link link);
  std::vector<Route> all_routes() const;

 private:
  struct Entry {
    std::optional<Route> primary;
    std::optional<Route> alternate;
  };
  std::map<NodeId, Entry> entries_;
};

class MeaDsrAgent final : public SourceRoutingAgent {
 public:
  MeaDsrAgent(NodeContext& ctx, RoutingParams params, ProtocolProbe* probe = nullptr)
      : SourceRoutingAgent(ctx, params, probe) {}

  std::optional<Route> route_to(NodeId dest) const override { return cache_.lookup(dest); }
  std::vector<Route> cached_routes() const override { return cache_.all_routes(); }

  const RequestTable& request_table() const { return request_table_; }
  const RouteTable& route_table() const { return route_table_; }
  const MeaRouteCache& cache() const { return cache_; }

 protected:
  void handle_rreq(const Frame& frame, const RouteRequest& rreq) override;
  void handle_rrep_at_initiator(const RouteReply& rrep) override;
  void handle_data_link_failure(DataPacket pkt, NodeId next_hop) override;
  std::set<NodeId> purge_link(Link link) override { return cache_.purge_link(link); }

 private:
  void wait_time_expired(NodeId src, std::uint32_t seq);
  void send_rrep(NodeId src, std::uint32_t seq, const RouteCandidate& c, std::uint8_t rank);

  RequestTable request_table_;
  RouteTable route_table_;
  MeaRouteCache cache_;
};

}  // namespace meadsr
