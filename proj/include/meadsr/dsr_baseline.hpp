#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "meadsr/packets.hpp"
#include "meadsr/routing.hpp"

namespace meadsr {

/// Unbounded path cache. Every stored path starts at the owning node; a
/// route to D is the prefix of any stored path that reaches D.
class DsrRouteCache {
 public:
  explicit DsrRouteCache(NodeId owner) : owner_(owner) {}

  /// Ignores paths that do not start at the owner, are too short, or loop.
  void add(const Route& path);
  /// Shortest known route owner..dest; ties broken lexicographically.
  std::optional<Route> lookup(NodeId dest) const;
  std::set<NodeId> purge_link(Link link);
  std::vector<Route> all_routes() const { return {paths_.begin(), paths_.end()}; }
  std::size_t size() const { return paths_.size(); }

 private:
  NodeId owner_;
  std::set<Route> paths_;
};

enum class DsrRreqAction { kReplyAsDestination, kReplyFromCache, kForward, kDiscard };

/// Baseline DSR: flooding with strict duplicate suppression, cache replies
/// with loop-checked concatenation, path learning from forwarded traffic, and
/// packet salvaging.
class DsrAgent final : public SourceRoutingAgent {
 public:
  DsrAgent(NodeContext& ctx, RoutingParams params, ProtocolProbe* probe = nullptr)
      : SourceRoutingAgent(ctx, params, probe), cache_(ctx.self()) {}

  std::optional<Route> route_to(NodeId dest) const override { return cache_.lookup(dest); }
  std::vector<Route> cached_routes() const override { return cache_.all_routes(); }

  const DsrRouteCache& cache() const { return cache_; }
  DsrRouteCache& cache() { return cache_; }
  DsrRreqAction last_rreq_action() const { return last_action_; }

 protected:
  void handle_rreq(const Frame& frame, const RouteRequest& rreq) override;
  void handle_rrep_at_initiator(const RouteReply& rrep) override;
  void handle_data_link_failure(DataPacket pkt, NodeId next_hop) override;
  std::set<NodeId> purge_link(Link link) override { return cache_.purge_link(link); }
  void overhear_path(const Route& path, std::size_t self_index) override;

 private:
  void reply(const Route& path, std::size_t self_index, std::uint32_t seq);

  DsrRouteCache cache_;
  std::set<std::pair<NodeId, std::uint32_t>> seen_;
  DsrRreqAction last_action_ = DsrRreqAction::kDiscard;
};

}  // namespace meadsr
