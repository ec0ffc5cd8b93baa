#include "meadsr/traffic.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

namespace meadsr {

namespace {

std::int64_t interval_micros(double interval) {
  const auto us = static_cast<std::int64_t>(std::llround(interval * 1e6));
  if (us <= 0) throw std::invalid_argument("cbr: interval must be at least 1 microsecond");
  return us;
}

}  // namespace

std::vector<Connection> generate_connections(std::size_t node_count, std::size_t n_connections, double rate,
                                             RngStream& stream, std::uint32_t packet_size, double max_start) {
  if (n_connections == 0) throw std::invalid_argument("traffic: n_connections must be >= 1");
  if (!(rate > 0.0)) throw std::invalid_argument("traffic: rate must be > 0");
  if (node_count < 2 || n_connections > node_count * (node_count - 1)) {
    throw std::invalid_argument("traffic: more connections than distinct (src, dst) pairs");
  }
  // Interval on the microsecond grid, so the connection file round-trips.
  const double interval = static_cast<double>(interval_micros(1.0 / rate)) / 1e6;
  const auto last = static_cast<std::int64_t>(node_count) - 1;

  std::set<std::pair<NodeId, NodeId>> used;
  std::vector<Connection> out;
  out.reserve(n_connections);
  while (out.size() < n_connections) {
    const auto src = static_cast<NodeId>(stream.uniform_int(0, last));
    auto dst = static_cast<NodeId>(stream.uniform_int(0, last - 1));
    if (dst >= src) ++dst;
    if (!used.insert({src, dst}).second) continue;
    Connection c;
    c.src = src;
    c.dst = dst;
    c.start_time = SimTime::from_seconds(stream.uniform(0.0, max_start));
    c.packet_size = packet_size;
    c.interval = interval;
    out.push_back(c);
  }
  return out;
}

void write_connections(std::ostream& out, const std::vector<Connection>& conns) {
  char buf[160];
  for (const Connection& c : conns) {
    std::snprintf(buf, sizeof buf, "%u %u %s %u %.6f %llu\n", c.src, c.dst, c.start_time.to_string().c_str(),
                  c.packet_size, c.interval, static_cast<unsigned long long>(c.max_packets));
    out << buf;
  }
}

std::vector<Connection> read_connections(std::istream& in) {
  std::vector<Connection> conns;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream fields(line);
    Connection c;
    double start = 0;
    unsigned long long max_packets = 0;
    if (!(fields >> c.src >> c.dst >> start >> c.packet_size >> c.interval >> max_packets)) {
      throw std::invalid_argument("connection file line " + std::to_string(lineno) + ": malformed record");
    }
    if (c.src == c.dst) {
      throw std::invalid_argument("connection file line " + std::to_string(lineno) + ": src == dst");
    }
    c.start_time = SimTime::from_seconds(start);
    c.max_packets = max_packets;
    conns.push_back(c);
  }
  return conns;
}

std::optional<SimTime> CbrSource::next_emission(SimTime end) {
  if (emitted_ >= conn_.max_packets) return std::nullopt;
  const std::int64_t width = interval_micros(conn_.interval);
  const SimTime slot = conn_.start_time + SimTime::from_micros(static_cast<std::int64_t>(emitted_) * width);
  if (slot >= end) return std::nullopt;
  const auto offset = static_cast<std::int64_t>(stream_.uniform01() * static_cast<double>(width));
  const SimTime t = slot + SimTime::from_micros(offset);
  if (t >= end) return std::nullopt;
  ++emitted_;
  return t;
}

std::vector<SimTime> cbr_schedule(const Connection& conn, RngStream stream, SimTime end) {
  CbrSource src(conn, std::move(stream));
  std::vector<SimTime> times;
  while (auto t = src.next_emission(end)) times.push_back(*t);
  return times;
}

}  // namespace meadsr
