#include "meadsr/route_selection.hpp"

#include <algorithm>
#include <stdexcept>

namespace meadsr {

int compare_energy_ratio(const RouteCandidate& a, const RouteCandidate& b) {
  if (!a.min_bat_lev || !b.min_bat_lev) {
    if (!a.min_bat_lev && !b.min_bat_lev) return 0;
    return a.min_bat_lev ? -1 : 1;
  }
  const __int128 lhs = static_cast<__int128>(a.min_bat_lev->nanojoules()) * b.route_length();
  const __int128 rhs = static_cast<__int128>(b.min_bat_lev->nanojoules()) * a.route_length();
  return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
}

bool ranks_before(const RouteCandidate& a, const RouteCandidate& b) {
  if (const int c = compare_energy_ratio(a, b); c != 0) return c > 0;
  if (a.arriving_time != b.arriving_time) return a.arriving_time < b.arriving_time;
  return a.intermediates < b.intermediates;
}

std::size_t select_primary_route(std::span<const RouteCandidate> candidates) {
  if (candidates.empty()) throw std::logic_error("select_primary_route: no candidates");
  std::size_t best = 0;
  for (std::size_t i = 1; i < candidates.size(); ++i) {
    if (ranks_before(candidates[i], candidates[best])) best = i;
  }
  return best;
}

std::size_t shared_intermediates(const Route& a, const Route& b) {
  if (a.size() < 2 || b.size() < 2 || a.front() != b.front() || a.back() != b.back()) {
    throw std::invalid_argument("shared_intermediates: routes must share both endpoints");
  }
  std::size_t shared = 0;
  for (std::size_t i = 1; i + 1 < a.size(); ++i) {
    if (std::find(b.begin() + 1, b.end() - 1, a[i]) != b.end() - 1) ++shared;
  }
  return shared;
}

std::optional<std::size_t> select_alternate_route(std::span<const RouteCandidate> candidates, std::size_t primary) {
  if (primary >= candidates.size()) throw std::out_of_range("select_alternate_route: bad primary index");
  // Endpoints are irrelevant to the count; any fixed pair works.
  constexpr NodeId kSrc = kBroadcast - 1;
  constexpr NodeId kDst = kBroadcast - 2;
  const Route reference = complete_path(kSrc, candidates[primary], kDst);
  std::optional<std::size_t> best;
  std::size_t best_shared = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i == primary) continue;
    const std::size_t shared = shared_intermediates(complete_path(kSrc, candidates[i], kDst), reference);
    if (!best || shared < best_shared ||
        (shared == best_shared && ranks_before(candidates[i], candidates[*best]))) {
      best = i;
      best_shared = shared;
    }
  }
  return best;
}

Route complete_path(NodeId src, const RouteCandidate& c, NodeId dest) {
  Route path;
  path.reserve(c.intermediates.size() + 2);
  path.push_back(src);
  path.insert(path.end(), c.intermediates.begin(), c.intermediates.end());
  path.push_back(dest);
  return path;
}

}  // namespace meadsr
