#include <doctest.h>

#include <sstream>

#include "meadsr/metrics.hpp"
#include "meadsr/radio_mac.hpp"
#include "test_support.hpp"

using namespace meadsr;
using meadsr::testing::J;

namespace {

TraceEvent ev(TraceAction a, TraceLayer l, PacketKind k, std::uint64_t uid, double t,
              std::optional<DropReason> reason = {}) {
  TraceEvent e;
  e.action = a;
  e.layer = l;
  e.kind = k;
  e.uid = uid;
  e.time = SimTime::from_seconds(t);
  e.reason = reason;
  return e;
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("srn counts routing-layer sends and forwards of control packets") {
    std::vector<TraceEvent> t;
    for (int i = 0; i < 10; ++i) t.push_back(ev(TraceAction::kSend, TraceLayer::kRtr, PacketKind::kRreq, 1000 + i, 0));
    for (int i = 0; i < 15; ++i) t.push_back(ev(TraceAction::kForward, TraceLayer::kRtr, PacketKind::kRrep, 2000, 0));
    for (int i = 0; i < 5; ++i) t.push_back(ev(TraceAction::kSend, TraceLayer::kRtr, PacketKind::kRerr, 3000, 0));
    // Not counted: MAC-layer control, routing-layer data, receptions.
    t.push_back(ev(TraceAction::kSend, TraceLayer::kMac, PacketKind::kRreq, 1000, 0));
    t.push_back(ev(TraceAction::kForward, TraceLayer::kRtr, PacketKind::kData, 1, 0));
    t.push_back(ev(TraceAction::kRecv, TraceLayer::kRtr, PacketKind::kRrep, 2000, 0));
    for (std::uint64_t u = 0; u < 100; ++u) {
      t.push_back(ev(TraceAction::kSend, TraceLayer::kAgt, PacketKind::kData, u, 1.0));
      t.push_back(ev(TraceAction::kRecv, TraceLayer::kAgt, PacketKind::kData, u, 1.5));
    }
    const DeliveryMetrics m = compute_delivery_metrics(t);
    REQUIRE(m.srn.has_value());
    CHECK(*m.srn == doctest::Approx(0.3));
    CHECK(m.routing_packets == 30);
  }

  TEST_CASE("td is received over sent") {
    std::vector<TraceEvent> t;
    for (std::uint64_t u = 0; u < 100; ++u) {
      t.push_back(ev(TraceAction::kSend, TraceLayer::kAgt, PacketKind::kData, u, 0));
      if (u < 85) t.push_back(ev(TraceAction::kRecv, TraceLayer::kAgt, PacketKind::kData, u, 1));
    }
    CHECK(compute_delivery_metrics(t).td == doctest::Approx(0.85));
  }

  TEST_CASE("dm averages delivered delays from the first send") {
    std::vector<TraceEvent> t{
        ev(TraceAction::kSend, TraceLayer::kAgt, PacketKind::kData, 1, 1.0),
        ev(TraceAction::kSend, TraceLayer::kAgt, PacketKind::kData, 1, 1.05),  // later duplicate send ignored
        ev(TraceAction::kRecv, TraceLayer::kAgt, PacketKind::kData, 1, 1.1),
        ev(TraceAction::kSend, TraceLayer::kAgt, PacketKind::kData, 2, 2.0),
        ev(TraceAction::kRecv, TraceLayer::kAgt, PacketKind::kData, 2, 2.3),
        ev(TraceAction::kSend, TraceLayer::kAgt, PacketKind::kData, 3, 3.0),  // never delivered
    };
    const DeliveryMetrics m = compute_delivery_metrics(t);
    REQUIRE(m.dm.has_value());
    CHECK(*m.dm == doctest::Approx(0.2));
  }

  TEST_CASE("nothing delivered leaves srn and dm undefined") {
    std::vector<TraceEvent> t{ev(TraceAction::kSend, TraceLayer::kAgt, PacketKind::kData, 1, 1.0)};
    const DeliveryMetrics m = compute_delivery_metrics(t);
    CHECK_FALSE(m.srn.has_value());
    CHECK_FALSE(m.dm.has_value());
    CHECK(m.td == 0.0);
    const EnergyMetrics e = compute_energy_metrics(std::vector<Energy>{J(1)}, std::vector<Energy>{J(999)}, J(1000), 0);
    CHECK_FALSE(e.ecp.has_value());
    const MetricsReport r = make_report(m, e, DropCensus{});
    CHECK(csv_metric_fields(r).rfind("NA,0.000000,NA,NA,", 0) == 0);
  }

  TEST_CASE("energy metrics worked examples") {
    const std::vector<Energy> consumed{J(2), J(4)};
    CHECK(population_stddev(consumed) == doctest::Approx(1.0));
    const std::vector<Energy> residual{J(500), J(800)};
    const EnergyMetrics e = compute_energy_metrics(consumed, residual, J(1000), 2);
    CHECK(e.etecn == doctest::Approx(1.0));
    CHECK(e.term == doctest::Approx(0.5));
    CHECK(*e.ecp == doctest::Approx(3.0));

    const std::vector<Energy> four{J(3), J(3), J(3), J(3)};
    const EnergyMetrics f = compute_energy_metrics(four, four, J(1000), 4);
    CHECK(f.total_consumed == J(12));
    CHECK(*f.ecp == doctest::Approx(3.0));
    CHECK(f.etecn == 0.0);
  }

  TEST_CASE("energy metrics from a ledger") {
    EnergyLedger l(2, J(1000), 1.4, 1.0);
    l.charge(0, EnergyRole::kRx, SimTime::from_seconds(2));
    l.charge(1, EnergyRole::kRx, SimTime::from_seconds(4));
    const EnergyMetrics e = compute_energy_metrics(l, 2);
    CHECK(e.etecn == doctest::Approx(1.0));
    CHECK(e.term == doctest::Approx(0.996));
    CHECK(*e.ecp == doctest::Approx(3.0));
  }

  TEST_CASE("drop census partitions data drops") {
    std::vector<TraceEvent> t;
    for (int i = 0; i < 3; ++i) t.push_back(ev(TraceAction::kDrop, TraceLayer::kMac, PacketKind::kData, i, 0, DropReason::kIfq));
    t.push_back(ev(TraceAction::kDrop, TraceLayer::kRtr, PacketKind::kData, 7, 0, DropReason::kNrte));
    t.push_back(ev(TraceAction::kDrop, TraceLayer::kRtr, PacketKind::kData, 8, 0, DropReason::kTout));
    t.push_back(ev(TraceAction::kDrop, TraceLayer::kRtr, PacketKind::kData, 9, 0, DropReason::kTtl));
    t.push_back(ev(TraceAction::kDrop, TraceLayer::kMac, PacketKind::kData, 10, 0, DropReason::kNodeDead));
    t.push_back(ev(TraceAction::kDrop, TraceLayer::kMac, PacketKind::kRreq, 11, 0, DropReason::kCollision));  // control
    const DropCensus c = drop_census(t);
    CHECK(c.count(DropReason::kIfq) == 3);
    CHECK(c.count(DropReason::kNrte) == 1);
    CHECK(c.count(DropReason::kTout) == 1);
    CHECK(c.count(DropReason::kTtl) == 1);
    CHECK(c.count(DropReason::kNodeDead) == 1);
    CHECK(c.count(DropReason::kCollision) == 0);
    CHECK(c.total() == 7);
    CHECK(drop_census(std::vector<TraceEvent>{}).total() == 0);
  }

  TEST_CASE("streaming collector flags orphan deliveries") {
    MetricsCollector c(2);
    c.record(ev(TraceAction::kRecv, TraceLayer::kAgt, PacketKind::kData, 5, 1.0));
    CHECK(c.orphan_receives() == 1);
  }

  TEST_CASE("summary uses the classic report lines") {
    MetricsReport r;
    r.td = 0.5;
    r.srn = 1.25;
    r.term = 0.9;
    std::ostringstream out;
    print_summary(out, r);
    const std::string s = out.str();
    for (const char* line : {"packet delivery fraction 50.000000", "normalized routing overhead 1.250000",
                             "average end to end delay NA", "energy consumed per packet NA", "deviation 0.000000",
                             "minimal residual energy 90.000000"}) {
      CHECK(s.find(line) != std::string::npos);
    }
  }
}

TEST_SUITE("trace") {
  TEST_CASE("trace lines round-trip") {
    TraceEvent e = ev(TraceAction::kDrop, TraceLayer::kRtr, PacketKind::kData, 42, 12.345678, DropReason::kTout);
    e.node = 7;
    e.size = 512;
    const std::string line = format_trace_line(e);
    CHECK(line == "d 12.345678 7 RTR DATA 42 512 TOUT 0");
    CHECK(parse_trace_line(line) == e);

    TraceEvent en = ev(TraceAction::kEnergy, TraceLayer::kMac, PacketKind::kRreq, 3, 1.0);
    en.role = EnergyRole::kRx;
    en.energy = Energy::from_nanojoules(96000);
    CHECK(parse_trace_line(format_trace_line(en)) == en);
    CHECK_THROWS_AS(parse_trace_line("x 1.0 2"), std::invalid_argument);
  }

  TEST_CASE("written trace reads back") {
    std::stringstream buf;
    TraceWriter w(buf);
    TraceEvent a = ev(TraceAction::kSend, TraceLayer::kAgt, PacketKind::kData, 1, 0.5);
    TraceEvent b = ev(TraceAction::kRecv, TraceLayer::kAgt, PacketKind::kData, 1, 0.75);
    w.record(a);
    w.record(b);
    const auto back = read_trace(buf);
    REQUIRE(back.size() == 2);
    CHECK(back[0] == a);
    CHECK(back[1] == b);
  }
}
