#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "meadsr/traffic.hpp"

using namespace meadsr;

TEST_SUITE("traffic") {
  TEST_CASE("rate 4 gives a 0.25 s interval") {
    RngStream rng(1, "traffic");
    const auto conns = generate_connections(50, 10, 4.0, rng);
    for (const Connection& c : conns) {
      CHECK(c.interval == 0.25);
      CHECK(c.packet_size == 512);
      CHECK(c.max_packets == 10000);
    }
  }

  TEST_CASE("10 connections over 50 nodes are distinct pairs starting in [0, 120]") {
    RngStream rng(2, "traffic");
    const auto conns = generate_connections(50, 10, 4.0, rng);
    REQUIRE(conns.size() == 10);
    std::set<std::pair<NodeId, NodeId>> pairs;
    for (const Connection& c : conns) {
      CHECK(c.src != c.dst);
      CHECK(c.src < 50);
      CHECK(c.dst < 50);
      CHECK(c.start_time >= SimTime{});
      CHECK(c.start_time <= SimTime::from_seconds(120));
      pairs.insert({c.src, c.dst});
    }
    CHECK(pairs.size() == 10);
  }

  TEST_CASE("every pair can be drawn") {
    RngStream rng(2, "traffic");
    CHECK(generate_connections(3, 6, 1.0, rng).size() == 6);
  }

  TEST_CASE("invalid requests are rejected") {
    RngStream rng(3, "traffic");
    CHECK_THROWS_AS(generate_connections(50, 0, 4.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(generate_connections(50, 10, 0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(generate_connections(3, 7, 1.0, rng), std::invalid_argument);
  }

  TEST_CASE("emission counts over a window") {
    Connection c;
    c.start_time = SimTime::from_seconds(0.0);
    const auto times = cbr_schedule(c, RngStream(4, "cbr"), SimTime::from_seconds(10.0));
    CHECK(times.size() >= 39);
    CHECK(times.size() <= 41);
    for (std::size_t k = 0; k < times.size(); ++k) {
      // Packet k falls inside its own interval.
      CHECK(times[k] >= SimTime::from_micros(static_cast<std::int64_t>(k) * 250000));
      CHECK(times[k] < SimTime::from_micros(static_cast<std::int64_t>(k + 1) * 250000));
    }
  }

  TEST_CASE("emission count is floor or ceil of window / interval") {
    RngStream pick(5, "pick");
    for (int trial = 0; trial < 200; ++trial) {
      Connection c;
      c.start_time = SimTime::from_micros(pick.uniform_int(0, 120'000'000));
      c.max_packets = 1'000'000;
      c.interval = static_cast<double>(pick.uniform_int(10'000, 2'000'000)) / 1e6;
      const SimTime end = SimTime::from_seconds(600.0);
      const auto times = cbr_schedule(c, RngStream(static_cast<std::uint64_t>(trial), "cbr"), end);
      const double ratio = (end - c.start_time).seconds() / c.interval;
      const auto n = static_cast<double>(times.size());
      CHECK((n == std::floor(ratio) || n == std::ceil(ratio)));
    }
  }

  TEST_CASE("last emission precedes the end of the run") {
    Connection c;
    c.start_time = SimTime::from_seconds(37.5);
    const auto times = cbr_schedule(c, RngStream(6, "cbr"), SimTime::from_seconds(600.0));
    REQUIRE_FALSE(times.empty());
    CHECK(times.front() >= c.start_time);
    CHECK(times.back() < SimTime::from_seconds(600.0));
  }

  TEST_CASE("max_packets caps emissions") {
    Connection c;
    c.max_packets = 3;
    CHECK(cbr_schedule(c, RngStream(7, "cbr"), SimTime::from_seconds(600.0)).size() == 3);
  }

  TEST_CASE("schedule is a pure function of parameters and stream") {
    Connection c;
    c.start_time = SimTime::from_seconds(12.0);
    const SimTime end = SimTime::from_seconds(100.0);
    CHECK(cbr_schedule(c, RngStream(8, "cbr"), end) == cbr_schedule(c, RngStream(8, "cbr"), end));
  }

  TEST_CASE("connection file round-trips") {
    RngStream rng(10, "traffic");
    const auto conns = generate_connections(50, 10, 3.0, rng);
    std::stringstream buf;
    write_connections(buf, conns);
    CHECK(read_connections(buf) == conns);
    std::istringstream self_loop("4 4 1.0 512 0.25 10000\n");
    CHECK_THROWS_AS(read_connections(self_loop), std::invalid_argument);
  }
}
