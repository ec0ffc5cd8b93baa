#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace meadsr {

enum class Protocol { kMeaDsr, kDsr };

std::string_view to_string(Protocol p);
/// Accepts "MEA-DSR" / "DSR" (case-insensitive); throws ConfigError otherwise.
Protocol parse_protocol(std::string_view text);

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Full description of one experiment. Defaults are the reference network:
/// 50 nodes on 1000x1000 m, 250 m range, 2 Mb/s, random waypoint at
/// 5-10 m/s with 100 s pauses, 600 s runs, 10 CBR flows of 512-byte packets
/// at 4 pkt/s, 1.4 W transmit / 1 W receive, 1000 J batteries, WT = 60 ms.
struct ScenarioConfig {
  std::size_t n_nodes = 50;
  double area_width = 1000.0;
  double area_height = 1000.0;
  double range = 250.0;
  double bitrate = 2e6;
  double speed_min = 5.0;
  double speed_max = 10.0;
  double pause = 100.0;
  double sim_end = 600.0;
  std::size_t n_connections = 10;
  double pkt_rate = 4.0;
  std::uint32_t pkt_size = 512;
  double tx_power = 1.4;
  double rx_power = 1.0;
  double initial_energy = 1000.0;
  double wt = 0.06;
  Protocol protocol = Protocol::kMeaDsr;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the key and the violated bound.
  void validate() const;
  bool operator==(const ScenarioConfig&) const = default;
};

/// Flat `key = value` lines; `#` starts a comment. Missing keys keep their
/// defaults, unknown or repeated keys are rejected.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);
/// Every key in canonical order, shortest round-trip number formatting.
std::string serialize_config(const ScenarioConfig& config);
/// Applies one `key=value` override on top of an existing config.
void apply_override(ScenarioConfig& config, std::string_view assignment);

enum class SweepAxis { kPause, kSpeedClass, kDensity, kRate, kSessions, kWt };

std::string_view to_string(SweepAxis a);
SweepAxis parse_axis(std::string_view text);

struct SweepPoint {
  double value = 0.0;
  /// Text written to the axis_value column.
  std::string label;
};

struct SpeedRange {
  double min;
  double max;
};

/// low = [0.5, 1], medium = [5, 10], high = [20, 25] m/s.
SpeedRange speed_class_range(std::string_view name);

std::vector<SweepPoint> default_points(SweepAxis axis);
/// Parses a comma-separated list of points for the axis.
std::vector<SweepPoint> parse_points(SweepAxis axis, std::string_view csv);

struct SweepRun {
  std::size_t point_index = 0;
  SweepPoint point;
  Protocol protocol = Protocol::kMeaDsr;
  std::uint64_t seed = 0;
  ScenarioConfig config;
};

inline constexpr int kSeedsPerPoint = 5;

/// One config per (point, protocol, seed); seeds run base.seed .. base.seed + seeds - 1.
/// Ordered by point, then protocol (MEA-DSR first), then seed.
std::vector<SweepRun> sweep_grid(const ScenarioConfig& base, SweepAxis axis, std::span<const SweepPoint> points,
                                 int seeds = kSeedsPerPoint);

}  // namespace meadsr
