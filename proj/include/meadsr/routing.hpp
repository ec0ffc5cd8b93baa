#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "meadsr/packets.hpp"
#include "meadsr/route_selection.hpp"
#include "meadsr/sim_core.hpp"
#include "meadsr/trace.hpp"

namespace meadsr {

/// Send-buffer and discovery constants shared by both protocols.
struct RoutingParams {
  SimTime wait_time = SimTime::from_seconds(0.06);
  std::size_t send_buffer_capacity = 64;
  SimTime send_buffer_timeout = SimTime::from_seconds(30.0);
  SimTime discovery_backoff_initial = SimTime::from_seconds(0.5);
  SimTime discovery_backoff_max = SimTime::from_seconds(10.0);
  int max_salvage = 15;
  int initial_ttl = 64;
  /// Broadcasts leave the routing layer after a uniform delay in [0, broadcast_jitter).
  SimTime broadcast_jitter = SimTime::from_micros(10000);
};

/// What a routing agent may ask of the node hosting it.
class NodeContext {
 public:
  virtual ~NodeContext() = default;
  virtual NodeId self() const = 0;
  virtual SimTime now() const = 0;
  virtual Energy residual_energy() const = 0;
  /// Hands a frame to the interface queue.
  virtual void transmit(Frame frame) = 0;
  virtual EventHandle schedule_after(SimTime delay, std::function<void()> fn) = 0;
  virtual void cancel(EventHandle handle) = 0;
  virtual std::uint64_t new_uid() = 0;
  virtual void record(const TraceEvent& ev) = 0;
  virtual void deliver_to_app(const DataPacket& pkt) = 0;
};

/// Observation points for protocol invariant checks. All no-ops by default.
class ProtocolProbe {
 public:
  virtual ~ProtocolProbe() = default;
  /// `stamped` is the forwarded copy, after the node appended itself.
  virtual void rreq_forwarded(NodeId /*node*/, const RouteRequest& /*incoming*/, const RouteRequest& /*stamped*/,
                              Energy /*residual*/, std::size_t /*first_copy_hops*/) {}
  virtual void rreq_at_destination(NodeId /*node*/, const RouteRequest& /*rreq*/) {}
  virtual void routes_selected(NodeId /*dest*/, NodeId /*src*/, std::uint32_t /*seq*/,
                               std::span<const RouteCandidate> /*candidates*/, std::size_t /*primary*/,
                               std::optional<std::size_t> /*alternate*/) {}
  virtual void rrep_sent(NodeId /*node*/, const RouteReply& /*rrep*/) {}
  virtual void route_installed(NodeId /*node*/, const Route& /*route*/) {}
  virtual void rerr_processed(NodeId /*node*/, Link /*link*/, const std::vector<Route>& /*cache_after*/) {}
};

/// Per-destination FIFO of data packets waiting for a route.
class SendBuffer {
 public:
  explicit SendBuffer(std::size_t per_destination_capacity) : capacity_(per_destination_capacity) {}

  /// Appends; if the destination's queue was full, returns the evicted oldest packet.
  std::optional<DataPacket> push(DataPacket pkt);
  std::vector<DataPacket> take(NodeId dest);
  /// Removes a specific packet, if still buffered.
  std::optional<DataPacket> remove(NodeId dest, std::uint64_t uid);
  std::vector<DataPacket> clear();

  std::size_t size(NodeId dest) const;
  std::size_t total() const;

 private:
  std::size_t capacity_;
  std::map<NodeId, std::deque<DataPacket>> queues_;
};

/// Machinery common to MEA-DSR and the DSR baseline: send buffer, discovery
/// retries with exponential backoff, source-routed forwarding of data, RREP
/// and RERR, and link-break bookkeeping.
class SourceRoutingAgent {
 public:
  SourceRoutingAgent(NodeContext& ctx, RoutingParams params, ProtocolProbe* probe);
  virtual ~SourceRoutingAgent() = default;
  SourceRoutingAgent(const SourceRoutingAgent&) = delete;
  SourceRoutingAgent& operator=(const SourceRoutingAgent&) = delete;

  /// Application hands over a packet (AGT send already traced).
  void originate_data(DataPacket pkt);
  void receive(const Frame& frame);
  /// MAC gave up on a unicast frame sent by this node.
  void link_failed(Frame frame);
  /// Node died: buffered data is dropped and timers stop.
  void shutdown();

  std::size_t buffered_data() const { return buffer_.total(); }
  bool discovery_pending(NodeId dest) const;
  std::uint32_t current_seq() const { return seq_; }

  /// Full path self..dest from the cache, if any.
  virtual std::optional<Route> route_to(NodeId dest) const = 0;
  virtual std::vector<Route> cached_routes() const = 0;

 protected:
  virtual void handle_rreq(const Frame& frame, const RouteRequest& rreq) = 0;
  virtual void handle_rrep_at_initiator(const RouteReply& rrep) = 0;
  virtual void handle_data_link_failure(DataPacket pkt, NodeId next_hop) = 0;
  /// Removes cached routes using the link; returns the destinations that lost a route.
  virtual std::set<NodeId> purge_link(Link link) = 0;
  /// Route knowledge from a packet passing through (DSR learns, MEA-DSR does not).
  virtual void overhear_path(const Route& /*path*/, std::size_t /*self_index*/) {}

  void start_discovery(NodeId dest);
  void route_available(NodeId dest);
  void send_on_route(DataPacket pkt, const Route& route);
  /// Sends a RERR for `link` back along path[0..self_index] (reversed).
  void report_link_break(const Route& path, std::size_t self_index, Link link);
  /// Source-side reaction to a broken link: restart discovery for active flows left without a route.
  void source_lost_routes(const std::set<NodeId>& affected);
  void drop_data(const DataPacket& pkt, DropReason reason);
  void trace(TraceAction action, PacketKind kind, std::uint64_t uid, std::uint32_t size,
             std::optional<DropReason> reason = {});
  void send_frame(NodeId link_dst, Payload payload, std::uint64_t uid);

  NodeContext& ctx_;
  RoutingParams params_;
  ProtocolProbe* probe_;
  std::map<NodeId, std::uint32_t> last_seq_;

 private:
  struct Discovery {
    SimTime backoff;
    std::optional<EventHandle> timer;
  };

  void send_rreq(NodeId dest);
  void discovery_timeout(NodeId dest);
  void buffer_packet(DataPacket pkt);
  void forward_data(DataPacket pkt);
  void forward_rrep(RouteReply rrep, std::uint64_t uid);
  void process_rerr(RouteError rerr, std::uint64_t uid);

  SendBuffer buffer_;
  std::map<NodeId, Discovery> discoveries_;
  std::set<NodeId> active_destinations_;
  std::uint32_t seq_ = 0;
  bool dead_ = false;
};

}  // namespace meadsr
