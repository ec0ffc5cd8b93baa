#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "meadsr/packets.hpp"
#include "meadsr/sim_core.hpp"

namespace meadsr {

/// A destination-side candidate route for one (src, seq) discovery round.
struct RouteCandidate {
  /// Intermediate nodes in traversal order; excludes source and destination.
  Route intermediates;
  /// Unset when no intermediate stamped the request (direct neighbor); such a
  /// route has no energy bottleneck and ranks above every stamped route.
  std::optional<Energy> min_bat_lev;
  SimTime arriving_time;

  /// Hops of the complete source-to-destination path.
  std::size_t route_length() const { return intermediates.size() + 1; }
  bool operator==(const RouteCandidate&) const = default;
};

/// Sign of (a.min_bat_lev / a.len) - (b.min_bat_lev / b.len), computed exactly.
int compare_energy_ratio(const RouteCandidate& a, const RouteCandidate& b);

/// Total order used for primary selection: higher ratio, then earlier
/// arrival, then lexicographically smaller route.
bool ranks_before(const RouteCandidate& a, const RouteCandidate& b);

/// Index of the candidate maximizing min_bat_lev / route_length.
/// Throws std::logic_error on an empty set.
std::size_t select_primary_route(std::span<const RouteCandidate> candidates);

/// Common nodes of two complete paths, excluding the shared endpoints.
/// Throws std::invalid_argument if the endpoints differ.
std::size_t shared_intermediates(const Route& a, const Route& b);

/// Among candidates other than `primary`, the one sharing the fewest
/// intermediates with it; ties go to ranks_before.
std::optional<std::size_t> select_alternate_route(std::span<const RouteCandidate> candidates, std::size_t primary);

/// src + intermediates + dest.
Route complete_path(NodeId src, const RouteCandidate& c, NodeId dest);

}  // namespace meadsr
