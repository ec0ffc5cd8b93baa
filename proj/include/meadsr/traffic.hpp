#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "meadsr/mobility.hpp"
#include "meadsr/sim_core.hpp"

namespace meadsr {

/// A constant-bit-rate flow over datagrams.
struct Connection {
  NodeId src = 0;
  NodeId dst = 0;
  SimTime start_time;
  std::uint32_t packet_size = 512;
  double interval = 0.25;  // seconds
  std::uint64_t max_packets = 10000;

  bool operator==(const Connection&) const = default;
};

/// Draws `n_connections` distinct (src, dst) pairs, src != dst, with start
/// times uniform in [0, max_start]. Sources may repeat.
std::vector<Connection> generate_connections(std::size_t node_count, std::size_t n_connections, double rate,
                                             RngStream& stream, std::uint32_t packet_size = 512,
                                             double max_start = 120.0);

/// `src dst start_time packet_size interval max_packets`, one per line.
void write_connections(std::ostream& out, const std::vector<Connection>& conns);
std::vector<Connection> read_connections(std::istream& in);

/// Emission times of one connection in [start_time, end): packet k goes out
/// at start + (k + u_k) * interval with u_k uniform in [0, 1).
class CbrSource {
 public:
  CbrSource(const Connection& conn, RngStream stream) : conn_(conn), stream_(std::move(stream)) {}

  /// Next emission time, or nullopt once max_packets is reached or the next
  /// slot starts at or after `end`.
  std::optional<SimTime> next_emission(SimTime end);
  std::uint64_t emitted() const { return emitted_; }
  const Connection& connection() const { return conn_; }

 private:
  Connection conn_;
  RngStream stream_;
  std::uint64_t emitted_ = 0;
};

/// All emission times of `conn` before `end`, from a fresh stream.
std::vector<SimTime> cbr_schedule(const Connection& conn, RngStream stream, SimTime end);

}  // namespace meadsr
