#include "meadsr/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace meadsr {

std::string_view to_string(Protocol p) { return p == Protocol::kMeaDsr ? "MEA-DSR" : "DSR"; }

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(text) + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view text) {
  Int v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key) + ": expected a non-negative integer, got '" + std::string(text) + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct KeyDef {
  std::string_view name;
  std::function<void(ScenarioConfig&, std::string_view)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

template <typename T>
KeyDef real_key(std::string_view name, T ScenarioConfig::*field) {
  return {name, [name, field](ScenarioConfig& c, std::string_view v) { c.*field = parse_double(name, v); },
          [field](const ScenarioConfig& c) { return format_double(c.*field); }};
}

template <typename T>
KeyDef int_key(std::string_view name, T ScenarioConfig::*field) {
  return {name, [name, field](ScenarioConfig& c, std::string_view v) { c.*field = parse_int<T>(name, v); },
          [field](const ScenarioConfig& c) { return std::to_string(c.*field); }};
}

const std::vector<KeyDef>& key_defs() {
  static const std::vector<KeyDef> defs = {
      int_key("n_nodes", &ScenarioConfig::n_nodes),
      real_key("area_width", &ScenarioConfig::area_width),
      real_key("area_height", &ScenarioConfig::area_height),
      real_key("range", &ScenarioConfig::range),
      real_key("bitrate", &ScenarioConfig::bitrate),
      real_key("speed_min", &ScenarioConfig::speed_min),
      real_key("speed_max", &ScenarioConfig::speed_max),
      real_key("pause", &ScenarioConfig::pause),
      real_key("sim_end", &ScenarioConfig::sim_end),
      int_key("n_connections", &ScenarioConfig::n_connections),
      real_key("pkt_rate", &ScenarioConfig::pkt_rate),
      int_key("pkt_size", &ScenarioConfig::pkt_size),
      real_key("tx_power", &ScenarioConfig::tx_power),
      real_key("rx_power", &ScenarioConfig::rx_power),
      real_key("initial_energy", &ScenarioConfig::initial_energy),
      real_key("wt", &ScenarioConfig::wt),
      {"protocol", [](ScenarioConfig& c, std::string_view v) { c.protocol = parse_protocol(v); },
       [](const ScenarioConfig& c) { return std::string(to_string(c.protocol)); }},
      int_key("seed", &ScenarioConfig::seed),
  };
  return defs;
}

const KeyDef& find_key(std::string_view name) {
  for (const KeyDef& k : key_defs()) {
    if (k.name == name) return k;
  }
  throw ConfigError("unknown key '" + std::string(name) + "'");
}

std::pair<std::string_view, std::string_view> split_assignment(std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(line) + "'");
  return {trim(line.substr(0, eq)), trim(line.substr(eq + 1))};
}

}  // namespace

Protocol parse_protocol(std::string_view text) {
  const std::string t = lower(trim(text));
  if (t == "mea-dsr" || t == "meadsr" || t == "mea_dsr") return Protocol::kMeaDsr;
  if (t == "dsr") return Protocol::kDsr;
  throw ConfigError("protocol: expected MEA-DSR or DSR, got '" + std::string(text) + "'");
}

void ScenarioConfig::validate() const {
  auto positive = [](double v, const char* key) {
    if (!(v > 0.0)) throw ConfigError(std::string(key) + ": must be > 0 (got " + format_double(v) + ")");
  };
  if (n_nodes < 2) throw ConfigError("n_nodes: must be >= 2 (got " + std::to_string(n_nodes) + ")");
  positive(area_width, "area_width");
  positive(area_height, "area_height");
  positive(range, "range");
  positive(bitrate, "bitrate");
  positive(speed_min, "speed_min");
  if (!(speed_max >= speed_min)) {
    throw ConfigError("speed_max: must be >= speed_min (" + format_double(speed_min) + ")");
  }
  if (!(pause >= 0.0)) throw ConfigError("pause: must be >= 0 (got " + format_double(pause) + ")");
  positive(sim_end, "sim_end");
  if (n_connections < 1) throw ConfigError("n_connections: must be >= 1");
  if (n_connections > n_nodes * (n_nodes - 1)) {
    throw ConfigError("n_connections: must be <= n_nodes*(n_nodes-1) = " + std::to_string(n_nodes * (n_nodes - 1)));
  }
  positive(pkt_rate, "pkt_rate");
  if (pkt_size == 0) throw ConfigError("pkt_size: must be > 0");
  positive(tx_power, "tx_power");
  positive(rx_power, "rx_power");
  positive(initial_energy, "initial_energy");
  positive(wt, "wt");
}

ScenarioConfig parse_config(std::string_view text) {
  ScenarioConfig cfg;
  std::set<std::string, std::less<>> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto [key, value] = split_assignment(line);
    const KeyDef& def = find_key(key);
    if (!seen.insert(std::string(key)).second) throw ConfigError("duplicate key '" + std::string(key) + "'");
    def.set(cfg, value);
  }
  cfg.validate();
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string serialize_config(const ScenarioConfig& config) {
  std::string out;
  for (const KeyDef& k : key_defs()) {
    out += k.name;
    out += " = ";
    out += k.get(config);
    out += '\n';
  }
  return out;
}

void apply_override(ScenarioConfig& config, std::string_view assignment) {
  auto [key, value] = split_assignment(trim(assignment));
  find_key(key).set(config, value);
  config.validate();
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::kPause: return "pause";
    case SweepAxis::kSpeedClass: return "speed_class";
    case SweepAxis::kDensity: return "density";
    case SweepAxis::kRate: return "rate";
    case SweepAxis::kSessions: return "sessions";
    case SweepAxis::kWt: return "wt";
  }
  return "?";
}

SweepAxis parse_axis(std::string_view text) {
  for (SweepAxis a : {SweepAxis::kPause, SweepAxis::kSpeedClass, SweepAxis::kDensity, SweepAxis::kRate,
                      SweepAxis::kSessions, SweepAxis::kWt}) {
    if (to_string(a) == lower(text)) return a;
  }
  throw ConfigError("unknown sweep axis '" + std::string(text) + "'");
}

SpeedRange speed_class_range(std::string_view name) {
  const std::string n = lower(name);
  if (n == "low") return {0.5, 1.0};
  if (n == "medium") return {5.0, 10.0};
  if (n == "high") return {20.0, 25.0};
  throw ConfigError("speed_class: expected low, medium or high, got '" + std::string(name) + "'");
}

namespace {

SweepPoint numeric_point(double v) { return SweepPoint{v, format_double(v)}; }

SweepPoint speed_point(std::string_view name) {
  static constexpr std::string_view kNames[] = {"low", "medium", "high"};
  speed_class_range(name);
  const std::string n = lower(name);
  const auto idx = std::find(std::begin(kNames), std::end(kNames), n) - std::begin(kNames);
  return SweepPoint{static_cast<double>(idx), n};
}

}  // namespace

std::vector<SweepPoint> default_points(SweepAxis axis) {
  std::vector<double> values;
  switch (axis) {
    case SweepAxis::kPause: values = {0, 100, 200, 300, 400, 500, 600}; break;
    case SweepAxis::kSpeedClass: return {speed_point("low"), speed_point("medium"), speed_point("high")};
    case SweepAxis::kDensity: values = {50, 60, 70, 80, 90, 100}; break;
    case SweepAxis::kRate: values = {2, 4, 6, 8, 10, 12}; break;
    case SweepAxis::kSessions: values = {10, 15, 20, 25, 30, 35, 40}; break;
    case SweepAxis::kWt: values = {0.01, 0.03, 0.06, 0.1, 0.2}; break;
  }
  std::vector<SweepPoint> out;
  for (double v : values) out.push_back(numeric_point(v));
  return out;
}

std::vector<SweepPoint> parse_points(SweepAxis axis, std::string_view csv) {
  std::vector<SweepPoint> out;
  while (!csv.empty()) {
    const auto comma = csv.find(',');
    const std::string_view item = trim(csv.substr(0, comma));
    csv = comma == std::string_view::npos ? std::string_view{} : csv.substr(comma + 1);
    if (item.empty()) continue;
    out.push_back(axis == SweepAxis::kSpeedClass ? speed_point(item)
                                                  : numeric_point(parse_double(to_string(axis), item)));
  }
  if (out.empty()) throw ConfigError("empty point list for axis " + std::string(to_string(axis)));
  return out;
}

namespace {

void apply_point(ScenarioConfig& c, SweepAxis axis, const SweepPoint& p) {
  switch (axis) {
    case SweepAxis::kPause: c.pause = p.value; break;
    case SweepAxis::kSpeedClass: {
      const SpeedRange r = speed_class_range(p.label);
      c.speed_min = r.min;
      c.speed_max = r.max;
      break;
    }
    case SweepAxis::kDensity: c.n_nodes = static_cast<std::size_t>(p.value); break;
    case SweepAxis::kRate: c.pkt_rate = p.value; break;
    case SweepAxis::kSessions: c.n_connections = static_cast<std::size_t>(p.value); break;
    case SweepAxis::kWt: c.wt = p.value; break;
  }
}

}  // namespace

std::vector<SweepRun> sweep_grid(const ScenarioConfig& base, SweepAxis axis, std::span<const SweepPoint> points,
                                 int seeds) {
  std::vector<SweepRun> runs;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (Protocol proto : {Protocol::kMeaDsr, Protocol::kDsr}) {
      for (int s = 0; s < seeds; ++s) {
        SweepRun run;
        run.point_index = i;
        run.point = points[i];
        run.protocol = proto;
        run.seed = base.seed + static_cast<std::uint64_t>(s);
        run.config = base;
        apply_point(run.config, axis, points[i]);
        run.config.protocol = proto;
        run.config.seed = run.seed;
        run.config.validate();
        runs.push_back(std::move(run));
      }
    }
  }
  return runs;
}

}  // namespace meadsr
