#include <doctest.h>

#include <cmath>
#include <sstream>

#include "meadsr/mobility.hpp"

using namespace meadsr;

namespace {

RwpParams small_params() {
  RwpParams p;
  p.nodes = 20;
  p.sim_end = SimTime::from_seconds(300.0);
  return p;
}

}  // namespace

TEST_SUITE("mobility") {
  TEST_CASE("random waypoint stays in the area and covers the run") {
    RngStream rng(3, "mobility");
    const RwpParams p = small_params();
    const MobilityScenario m = generate_rwp(p, rng);
    REQUIRE(m.node_count() == p.nodes);
    CHECK(m.span_end() >= p.sim_end);
    for (NodeId n = 0; n < m.node_count(); ++n) {
      for (const Waypoint& w : m.legs(n)) {
        CHECK(w.dest_pos.x >= 0.0);
        CHECK(w.dest_pos.x <= p.width);
        CHECK(w.dest_pos.y >= 0.0);
        CHECK(w.dest_pos.y <= p.height);
        if (w.start_pos != w.dest_pos) {
          CHECK(w.speed >= p.speed_min);
          CHECK(w.speed <= p.speed_max);
        }
      }
      for (int s = 0; s <= 300; s += 7) {
        const Vec2 v = m.position_at(n, SimTime::from_seconds(s));
        CHECK(v.x >= 0.0);
        CHECK(v.x <= p.width);
      }
    }
  }

  TEST_CASE("legs are contiguous and pauses honour the parameter") {
    RngStream rng(11, "mobility");
    const MobilityScenario m = generate_rwp(small_params(), rng);
    for (NodeId n = 0; n < m.node_count(); ++n) {
      const auto& legs = m.legs(n);
      CHECK(legs.front().start_time == SimTime{});
      for (std::size_t i = 1; i < legs.size(); ++i) {
        CHECK(legs[i].start_time == legs[i - 1].end_time());
        CHECK(legs[i].start_pos == legs[i - 1].dest_pos);
      }
      for (const Waypoint& w : legs) CHECK(w.pause_after == SimTime::from_seconds(100.0));
    }
  }

  TEST_CASE("movement is linear between waypoints") {
    const Waypoint w{SimTime{}, {0, 0}, {100, 0}, 10.0, SimTime::from_seconds(5)};
    const MobilityScenario m({{w}});
    CHECK(w.travel_time() == SimTime::from_seconds(10));
    CHECK(m.position_at(0, SimTime::from_seconds(4)).x == doctest::Approx(40.0));
    CHECK(m.position_at(0, SimTime::from_seconds(12)).x == doctest::Approx(100.0));
    CHECK_THROWS_AS(m.position_at(0, SimTime::from_seconds(15.5)), std::out_of_range);
  }

  TEST_CASE("pause equal to the run length means no movement") {
    RwpParams p = small_params();
    p.pause = 300.0;
    RngStream rng(5, "mobility");
    const MobilityScenario m = generate_rwp(p, rng);
    for (NodeId n = 0; n < m.node_count(); ++n) {
      const Vec2 a = m.position_at(n, SimTime{});
      const Vec2 b = m.position_at(n, SimTime::from_seconds(300));
      CHECK(a == b);
    }
  }

  TEST_CASE("scenario file round-trips exactly") {
    RngStream rng(9, "mobility");
    const MobilityScenario m = generate_rwp(small_params(), rng);
    std::stringstream buf;
    m.write(buf);
    const MobilityScenario back = MobilityScenario::read(buf);
    CHECK(back == m);
  }

  TEST_CASE("generation is a pure function of the stream") {
    RngStream a(21, "mobility");
    RngStream b(21, "mobility");
    CHECK(generate_rwp(small_params(), a) == generate_rwp(small_params(), b));
  }

  TEST_CASE("invalid parameters are rejected") {
    RngStream rng(1, "mobility");
    RwpParams p = small_params();
    p.speed_min = 0.0;
    CHECK_THROWS_AS(generate_rwp(p, rng), std::invalid_argument);
    p = small_params();
    p.speed_min = 12.0;
    CHECK_THROWS_AS(generate_rwp(p, rng), std::invalid_argument);
    p = small_params();
    p.width = 0.0;
    CHECK_THROWS_AS(generate_rwp(p, rng), std::invalid_argument);

    const Waypoint a{SimTime{}, {0, 0}, {10, 0}, 1.0, SimTime{}};
    const Waypoint gap{SimTime::from_seconds(20), {10, 0}, {10, 0}, 0.0, SimTime::from_seconds(1)};
    CHECK_THROWS_AS(MobilityScenario({{a, gap}}), std::invalid_argument);
    std::istringstream bad("0 0.0 1 2 3\n");
    CHECK_THROWS_AS(MobilityScenario::read(bad), std::invalid_argument);
  }

  TEST_CASE("stationary scenario") {
    const MobilityScenario m = stationary_scenario({{0, 0}, {200, 0}}, SimTime::from_seconds(50));
    CHECK(m.span_end() == SimTime::from_seconds(50));
    CHECK(distance(m.position_at(0, SimTime::from_seconds(20)), m.position_at(1, SimTime::from_seconds(20))) ==
          doctest::Approx(200.0));
  }
}
