#include "meadsr/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace meadsr {

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

SimTime Waypoint::travel_time() const {
  if (start_pos == dest_pos) return SimTime{};
  return SimTime::from_seconds(distance(start_pos, dest_pos) / speed);
}

MobilityScenario::MobilityScenario(std::vector<std::vector<Waypoint>> legs) : legs_(std::move(legs)) {
  bool first = true;
  for (std::size_t n = 0; n < legs_.size(); ++n) {
    const auto& node_legs = legs_[n];
    if (node_legs.empty()) throw std::invalid_argument("mobility: node " + std::to_string(n) + " has no legs");
    if (node_legs.front().start_time != SimTime{}) {
      throw std::invalid_argument("mobility: node " + std::to_string(n) + " does not start at t=0");
    }
    for (std::size_t i = 0; i < node_legs.size(); ++i) {
      const Waypoint& w = node_legs[i];
      if (w.start_pos != w.dest_pos && !(w.speed > 0.0)) {
        throw std::invalid_argument("mobility: moving leg with non-positive speed");
      }
      if (w.pause_after < SimTime{}) throw std::invalid_argument("mobility: negative pause");
      if (i + 1 < node_legs.size()) {
        const Waypoint& next = node_legs[i + 1];
        if (next.start_time != w.end_time() || next.start_pos != w.dest_pos) {
          throw std::invalid_argument("mobility: non-contiguous legs for node " + std::to_string(n));
        }
      }
    }
    const SimTime end = node_legs.back().end_time();
    if (first || end < span_end_) span_end_ = end;
    first = false;
  }
}

Vec2 MobilityScenario::position_at(NodeId node, SimTime t) const {
  if (t < SimTime{} || t > span_end_) {
    throw std::out_of_range("mobility: t=" + t.to_string() + " outside scenario span");
  }
  const auto& node_legs = legs_.at(node);
  auto it = std::upper_bound(node_legs.begin(), node_legs.end(), t,
                             [](SimTime v, const Waypoint& w) { return v < w.start_time; });
  const Waypoint& w = *std::prev(it);
  const SimTime travel = w.travel_time();
  const SimTime elapsed = t - w.start_time;
  if (elapsed >= travel) return w.dest_pos;
  const double frac = static_cast<double>(elapsed.micros()) / static_cast<double>(travel.micros());
  return Vec2{w.start_pos.x + frac * (w.dest_pos.x - w.start_pos.x),
              w.start_pos.y + frac * (w.dest_pos.y - w.start_pos.y)};
}

void MobilityScenario::write(std::ostream& out) const {
  char buf[256];
  for (std::size_t n = 0; n < legs_.size(); ++n) {
    for (const Waypoint& w : legs_[n]) {
      std::snprintf(buf, sizeof buf, "%zu %s %.6f %.6f %.6f %.6f %.6f %s\n", n,
                    w.start_time.to_string().c_str(), w.start_pos.x, w.start_pos.y, w.dest_pos.x,
                    w.dest_pos.y, w.speed, w.pause_after.to_string().c_str());
      out << buf;
    }
  }
}

MobilityScenario MobilityScenario::read(std::istream& in) {
  std::vector<std::vector<Waypoint>> legs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    std::size_t node = 0;
    double start = 0, pause = 0;
    Waypoint w;
    if (!(fields >> node >> start >> w.start_pos.x >> w.start_pos.y >> w.dest_pos.x >> w.dest_pos.y >>
          w.speed >> pause)) {
      throw std::invalid_argument("mobility file line " + std::to_string(lineno) + ": malformed record");
    }
    w.start_time = SimTime::from_seconds(start);
    w.pause_after = SimTime::from_seconds(pause);
    if (node >= legs.size()) legs.resize(node + 1);
    legs[node].push_back(w);
  }
  return MobilityScenario(std::move(legs));
}

namespace {

double quantize(double v) { return std::round(v * 1e6) / 1e6; }

Vec2 random_point(const RwpParams& p, RngStream& rng) {
  return Vec2{quantize(rng.uniform(0.0, p.width)), quantize(rng.uniform(0.0, p.height))};
}

}  // namespace

MobilityScenario generate_rwp(const RwpParams& p, RngStream& rng) {
  if (!(p.speed_min > 0.0)) throw std::invalid_argument("rwp: speed_min must be > 0");
  if (p.speed_min > p.speed_max) throw std::invalid_argument("rwp: speed_min > speed_max");
  if (!(p.width > 0.0) || !(p.height > 0.0)) throw std::invalid_argument("rwp: area must be positive");
  if (p.pause < 0.0) throw std::invalid_argument("rwp: negative pause");

  const SimTime pause = SimTime::from_seconds(p.pause);
  std::vector<std::vector<Waypoint>> legs(p.nodes);
  for (auto& node_legs : legs) {
    Vec2 here = random_point(p, rng);
    node_legs.push_back(Waypoint{SimTime{}, here, here, 0.0, pause});
    SimTime t = node_legs.back().end_time();
    while (t < p.sim_end) {
      Vec2 dest = random_point(p, rng);
      double speed = quantize(rng.uniform(p.speed_min, p.speed_max));
      speed = std::clamp(speed, p.speed_min, p.speed_max);
      Waypoint w{t, here, dest, speed, pause};
      // A zero-pause, zero-distance draw would not advance time.
      if (w.end_time() == t) w.pause_after = SimTime::from_micros(1);
      node_legs.push_back(w);
      here = dest;
      t = w.end_time();
    }
  }
  return MobilityScenario(std::move(legs));
}

MobilityScenario stationary_scenario(const std::vector<Vec2>& positions, SimTime sim_end) {
  std::vector<std::vector<Waypoint>> legs;
  legs.reserve(positions.size());
  for (Vec2 p : positions) legs.push_back({Waypoint{SimTime{}, p, p, 0.0, sim_end}});
  return MobilityScenario(std::move(legs));
}

}  // namespace meadsr
