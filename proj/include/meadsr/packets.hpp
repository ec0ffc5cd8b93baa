#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "meadsr/mobility.hpp"
#include "meadsr/sim_core.hpp"

namespace meadsr {

inline constexpr NodeId kBroadcast = std::numeric_limits<NodeId>::max();

using Route = std::vector<NodeId>;

/// Energy as an integer count of nanojoules, so ledger sums are exact.
class Energy {
 public:
  constexpr Energy() = default;
  static constexpr Energy from_nanojoules(std::int64_t nj) { return Energy(nj); }
  static Energy from_joules(double j);

  constexpr std::int64_t nanojoules() const { return nj_; }
  constexpr double joules() const { return static_cast<double>(nj_) / 1e9; }

  constexpr auto operator<=>(const Energy&) const = default;
  constexpr Energy operator+(Energy o) const { return Energy(nj_ + o.nj_); }
  constexpr Energy operator-(Energy o) const { return Energy(nj_ - o.nj_); }
  Energy& operator+=(Energy o) {
    nj_ += o.nj_;
    return *this;
  }
  Energy& operator-=(Energy o) {
    nj_ -= o.nj_;
    return *this;
  }

 private:
  constexpr explicit Energy(std::int64_t nj) : nj_(nj) {}
  std::int64_t nj_ = 0;
};

enum class PacketKind : std::uint8_t { kData, kRreq, kRrep, kRerr };
std::string_view to_string(PacketKind kind);

struct Link {
  NodeId from = 0;
  NodeId to = 0;
  bool operator==(const Link&) const = default;
};

/// True if `route` traverses the link in either direction.
bool route_uses_link(const Route& route, Link link);
bool has_duplicates(const Route& route);

struct RouteRequest {
  NodeId src = 0;
  NodeId dest = 0;
  std::uint32_t seq = 0;
  /// Nodes traversed so far, excluding `src`.
  Route route;
  /// Unset until the first forwarder stamps it.
  std::optional<Energy> min_bat_lev;
};

struct RouteReply {
  /// Full path from the discovery initiator (front) to the destination (back).
  Route path;
  std::uint32_t seq = 0;
  /// 0 = primary, 1 = alternate (MEA-DSR); DSR replies always use 0.
  std::uint8_t rank = 0;
  /// Index in `path` of the node currently holding the reply.
  std::size_t holder = 0;

  NodeId initiator() const { return path.front(); }
  NodeId target() const { return path.back(); }
};

struct RouteError {
  NodeId reporter = 0;
  Link broken;
  /// Reporter first, the traffic source being informed last.
  Route path;
  std::size_t holder = 0;

  NodeId dest() const { return path.back(); }
};

struct DataPacket {
  std::uint64_t uid = 0;
  NodeId origin = 0;
  NodeId dst = 0;
  std::uint32_t payload_bytes = 512;
  /// Current source route; front is the node that last (re)routed the packet.
  Route path;
  std::size_t holder = 0;
  int ttl = 64;
  int salvage_count = 0;
  std::vector<NodeId> salvaged_at;
  SimTime created;
};

using Payload = std::variant<RouteRequest, RouteReply, RouteError, DataPacket>;

struct Frame {
  PacketKind kind = PacketKind::kData;
  NodeId link_src = 0;
  NodeId link_dst = kBroadcast;
  std::uint32_t size = 0;
  /// Routing-layer packet id; forwarded copies keep the originator's id.
  std::uint64_t uid = 0;
  Payload payload;

  bool is_broadcast() const { return link_dst == kBroadcast; }
  bool is_control() const { return kind != PacketKind::kData; }
};

/// Header constants in bytes.
inline constexpr std::uint32_t kDataHeaderBytes = 16;
inline constexpr std::uint32_t kRreqHeaderBytes = 24;
inline constexpr std::uint32_t kRrepHeaderBytes = 24;
inline constexpr std::uint32_t kRerrBytes = 20;
inline constexpr std::uint32_t kBytesPerHop = 4;

/// Number of route hops a frame carries in its header.
std::uint32_t carried_hops(const Payload& payload);
std::uint32_t frame_size(const Payload& payload);
PacketKind kind_of(const Payload& payload);

}  // namespace meadsr
