#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "meadsr/sim_core.hpp"

namespace meadsr {

using NodeId = std::uint32_t;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

double distance(Vec2 a, Vec2 b);

/// One straight-line leg followed by a pause. A leg with start_pos == dest_pos
/// and speed 0 is a pure pause.
struct Waypoint {
  SimTime start_time;
  Vec2 start_pos;
  Vec2 dest_pos;
  double speed = 0.0;  // m/s
  SimTime pause_after;

  SimTime travel_time() const;
  SimTime end_time() const { return start_time + travel_time() + pause_after; }
  bool operator==(const Waypoint&) const = default;
};

struct RwpParams {
  std::size_t nodes = 50;
  double width = 1000.0;
  double height = 1000.0;
  double speed_min = 5.0;
  double speed_max = 10.0;
  double pause = 100.0;
  SimTime sim_end = SimTime::from_seconds(600.0);
};

/// Per-node contiguous leg lists covering [0, span_end()].
class MobilityScenario {
 public:
  MobilityScenario() = default;
  /// Throws std::invalid_argument if legs are not contiguous.
  explicit MobilityScenario(std::vector<std::vector<Waypoint>> legs);

  std::size_t node_count() const { return legs_.size(); }
  const std::vector<Waypoint>& legs(NodeId node) const { return legs_.at(node); }
  SimTime span_end() const { return span_end_; }

  /// Throws std::out_of_range outside [0, span_end()].
  Vec2 position_at(NodeId node, SimTime t) const;

  /// `node_id start_time x0 y0 x1 y1 speed pause`, six fractional digits.
  void write(std::ostream& out) const;
  static MobilityScenario read(std::istream& in);

  bool operator==(const MobilityScenario&) const = default;

 private:
  std::vector<std::vector<Waypoint>> legs_;
  SimTime span_end_;
};

/// Random waypoint: each node starts at a uniform position and pauses, then
/// repeatedly travels to a uniform destination at a uniform speed in
/// [speed_min, speed_max] and pauses again, until sim_end is covered.
/// Coordinates and speeds are quantized to 1e-6 so the scenario file
/// round-trips exactly.
MobilityScenario generate_rwp(const RwpParams& params, RngStream& stream);

/// Stationary nodes at fixed positions for [0, sim_end].
MobilityScenario stationary_scenario(const std::vector<Vec2>& positions, SimTime sim_end);

}  // namespace meadsr
