#include "meadsr/packets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace meadsr {

Energy Energy::from_joules(double j) {
  if (!std::isfinite(j)) throw std::invalid_argument("Energy: non-finite joules");
  return Energy(static_cast<std::int64_t>(std::llround(j * 1e9)));
}

std::string_view to_string(PacketKind kind) {
  switch (kind) {
    case PacketKind::kData: return "DATA";
    case PacketKind::kRreq: return "RREQ";
    case PacketKind::kRrep: return "RREP";
    case PacketKind::kRerr: return "RERR";
  }
  return "?";
}

bool route_uses_link(const Route& route, Link link) {
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    if ((route[i] == link.from && route[i + 1] == link.to) ||
        (route[i] == link.to && route[i + 1] == link.from)) {
      return true;
    }
  }
  return false;
}

bool has_duplicates(const Route& route) {
  std::unordered_set<NodeId> seen;
  for (NodeId n : route) {
    if (!seen.insert(n).second) return true;
  }
  return false;
}

PacketKind kind_of(const Payload& payload) {
  return std::visit(
      [](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RouteRequest>) return PacketKind::kRreq;
        else if constexpr (std::is_same_v<T, RouteReply>) return PacketKind::kRrep;
        else if constexpr (std::is_same_v<T, RouteError>) return PacketKind::kRerr;
        else return PacketKind::kData;
      },
      payload);
}

std::uint32_t carried_hops(const Payload& payload) {
  return std::visit(
      [](const auto& p) -> std::uint32_t {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RouteRequest>) {
          return static_cast<std::uint32_t>(p.route.size());
        } else if constexpr (std::is_same_v<T, RouteError>) {
          return 0;
        } else {
          return p.path.empty() ? 0 : static_cast<std::uint32_t>(p.path.size() - 1);
        }
      },
      payload);
}

std::uint32_t frame_size(const Payload& payload) {
  const std::uint32_t hops = carried_hops(payload);
  switch (kind_of(payload)) {
    case PacketKind::kData:
      return std::get<DataPacket>(payload).payload_bytes + kDataHeaderBytes + kBytesPerHop * hops;
    case PacketKind::kRreq: return kRreqHeaderBytes + kBytesPerHop * hops;
    case PacketKind::kRrep: return kRrepHeaderBytes + kBytesPerHop * hops;
    case PacketKind::kRerr: return kRerrBytes;
  }
  return 0;
}

}  // namespace meadsr
