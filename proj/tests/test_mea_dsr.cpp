#include <doctest.h>

#include "meadsr/mea_dsr.hpp"
#include "test_support.hpp"

using namespace meadsr;
using meadsr::testing::FakeNode;
using meadsr::testing::J;
using meadsr::testing::make_frame;
using meadsr::testing::rreq_frame;

namespace {

RouteRequest rreq(NodeId src, std::uint32_t seq, Route route) {
  RouteRequest r;
  r.src = src;
  r.dest = 99;
  r.seq = seq;
  r.route = std::move(route);
  return r;
}

Frame rrep_frame(Route path, std::uint32_t seq, std::uint8_t rank, std::size_t holder) {
  RouteReply r;
  r.path = std::move(path);
  r.seq = seq;
  r.rank = rank;
  r.holder = holder;
  const NodeId from = r.path[holder];
  const NodeId to = r.path[holder - 1];
  return make_frame(from, to, r, 500);
}

DataPacket packet(std::uint64_t uid, NodeId origin, NodeId dst) {
  DataPacket p;
  p.uid = uid;
  p.origin = origin;
  p.dst = dst;
  return p;
}

const RouteReply& as_rrep(const Frame& f) { return std::get<RouteReply>(f.payload); }

}  // namespace

TEST_SUITE("mea_dsr.rules") {
  TEST_CASE("first copy of a new round is forwarded") {
    CHECK(duplicate_forward_decision(nullptr, rreq(0, 1, {1, 2}), 3) == RreqVerdict::kForward);
    RequestTableEntry old{0, 4, 2, {1}, 1};
    CHECK(duplicate_forward_decision(&old, rreq(0, 5, {7, 8, 9}), 3) == RreqVerdict::kForward);
  }

  TEST_CASE("loops are discarded") {
    CHECK(duplicate_forward_decision(nullptr, rreq(0, 1, {1, 3, 2}), 3) == RreqVerdict::kDiscardLoop);
    CHECK(duplicate_forward_decision(nullptr, rreq(3, 1, {1}), 3) == RreqVerdict::kDiscardLoop);
  }

  TEST_CASE("stale sequence numbers are discarded") {
    RequestTableEntry e{0, 5, 2, {1}, 1};
    CHECK(duplicate_forward_decision(&e, rreq(0, 4, {2}), 3) == RreqVerdict::kDiscardStale);
  }

  TEST_CASE("second copy must use a new link and be no longer than the first") {
    RequestTableEntry e{0, 5, 2, {2}, 1};
    CHECK(duplicate_forward_decision(&e, rreq(0, 5, {1, 2}), 3) == RreqVerdict::kDiscardSameLink);
    CHECK(duplicate_forward_decision(&e, rreq(0, 5, {1, 4, 6}), 3) == RreqVerdict::kDiscardLonger);
    CHECK(duplicate_forward_decision(&e, rreq(0, 5, {1, 6}), 3) == RreqVerdict::kForward);
    CHECK(duplicate_forward_decision(&e, rreq(0, 5, {6}), 3) == RreqVerdict::kForward);
  }

  TEST_CASE("at most two copies per round") {
    RequestTableEntry e{0, 5, 2, {2, 6}, 2};
    CHECK(duplicate_forward_decision(&e, rreq(0, 5, {1, 7}), 3) == RreqVerdict::kDiscardCopyCap);
  }

  TEST_CASE("a source neighbor's copy arrives over the source link") {
    CHECK(arriving_link(rreq(4, 1, {})) == 4);
    CHECK(arriving_link(rreq(4, 1, {1, 2})) == 2);
    RequestTableEntry e{4, 1, 0, {4}, 1};
    CHECK(duplicate_forward_decision(&e, rreq(4, 1, {}), 3) == RreqVerdict::kDiscardSameLink);
  }

  TEST_CASE("min_bat_lev keeps the minimum residual") {
    RouteRequest r = rreq(0, 1, {});
    r.min_bat_lev = J(900);
    CHECK(update_min_bat_lev(r, J(700)).min_bat_lev == J(700));
    CHECK(update_min_bat_lev(r, J(950)).min_bat_lev == J(900));
    CHECK(update_min_bat_lev(rreq(0, 1, {}), J(1000)).min_bat_lev == J(1000));
  }

  TEST_CASE("request table tracks copies per round") {
    RequestTable t;
    CHECK(t.find(0) == nullptr);
    t.record_forward(rreq(0, 1, {1, 2}));
    REQUIRE(t.find(0) != nullptr);
    CHECK(t.find(0)->nb_hops == 2);
    CHECK(t.find(0)->nb_copies == 1);
    t.record_forward(rreq(0, 1, {5}));
    CHECK(t.find(0)->nb_copies == 2);
    CHECK(t.find(0)->last_nodes == std::vector<NodeId>{2, 5});
    CHECK(t.find(0)->nb_hops == 2);
    t.record_forward(rreq(0, 2, {7, 8, 9}));
    CHECK(t.find(0)->seq == 2);
    CHECK(t.find(0)->nb_copies == 1);
    CHECK(t.find(0)->nb_hops == 3);
  }

  TEST_CASE("route table keeps one round per source") {
    RouteTable t;
    CHECK(t.insert(0, 3, RouteCandidate{{1}, J(5), SimTime{}}));
    CHECK_FALSE(t.insert(0, 3, RouteCandidate{{2}, J(6), SimTime{}}));
    CHECK(t.candidates(0, 3).size() == 2);
    CHECK_FALSE(t.insert(0, 2, RouteCandidate{{4}, J(6), SimTime{}}));
    CHECK(t.candidates(0, 3).size() == 2);
    CHECK(t.mark_replied(0, 3));
    CHECK_FALSE(t.mark_replied(0, 3));
    CHECK(t.insert(0, 4, RouteCandidate{{9}, J(1), SimTime{}}));
    CHECK(t.candidates(0, 3).empty());
    CHECK(t.candidates(0, 4).size() == 1);
    CHECK(t.candidates(7, 4).empty());
  }

  TEST_CASE("route cache purges a link in either direction") {
    MeaRouteCache c;
    c.install({0, 1, 2, 5}, MeaRouteCache::Slot::kPrimary);
    c.install({0, 3, 5}, MeaRouteCache::Slot::kAlternate);
    c.install({0, 2, 6}, MeaRouteCache::Slot::kPrimary);
    CHECK(c.lookup(5) == Route{0, 1, 2, 5});
    CHECK(c.purge_link({2, 1}) == std::set<NodeId>{5});
    CHECK_FALSE(c.get(5, MeaRouteCache::Slot::kPrimary));
    CHECK(c.lookup(5) == Route{0, 3, 5});
    CHECK(c.purge_link({3, 5}) == std::set<NodeId>{5});
    CHECK_FALSE(c.lookup(5));
    CHECK(c.all_routes() == std::vector<Route>{{0, 2, 6}});
  }
}

TEST_SUITE("mea_dsr.agent") {
  TEST_CASE("intermediate node appends itself and stamps its residual") {
    EventQueue q;
    FakeNode node(3, q);
    node.residual = J(400);
    MeaDsrAgent agent(node, RoutingParams{});
    agent.receive(rreq_frame(0, 9, 1, {1}, J(800)));
    REQUIRE(node.sent.size() == 1);
    const auto& out = std::get<RouteRequest>(node.sent[0].payload);
    CHECK(node.sent[0].is_broadcast());
    CHECK(out.route == Route{1, 3});
    CHECK(out.min_bat_lev == J(400));
    CHECK(node.count(TraceAction::kForward, PacketKind::kRreq) == 1);

    // Second copy over a different link, same length: forwarded. Third: capped.
    agent.receive(rreq_frame(0, 9, 1, {2}, J(800)));
    agent.receive(rreq_frame(0, 9, 1, {4}, J(800)));
    CHECK(node.sent.size() == 2);
    CHECK(agent.request_table().find(0)->nb_copies == 2);
  }

  TEST_CASE("destination answers after the wait time with primary and alternate") {
    EventQueue q;
    FakeNode node(5, q);
    RoutingParams params;
    params.wait_time = SimTime::from_seconds(0.06);
    MeaDsrAgent agent(node, params);
    agent.receive(rreq_frame(0, 5, 1, {1, 2}, J(900)));  // 900/3 = 300
    agent.receive(rreq_frame(0, 5, 1, {3}, J(500)));     // 500/2 = 250
    agent.receive(rreq_frame(0, 5, 1, {1, 4}, J(800)));  // 800/3 = 267
    CHECK(node.sent.empty());
    q.run_until(SimTime::from_seconds(0.059));
    CHECK(node.sent.empty());
    q.run_until(SimTime::from_seconds(0.06));
    REQUIRE(node.sent.size() == 2);
    CHECK(as_rrep(node.sent[0]).path == Route{0, 1, 2, 5});
    CHECK(as_rrep(node.sent[0]).rank == 0);
    CHECK(node.sent[0].link_dst == 2);
    // {3} shares nothing with the primary, {1, 4} shares node 1.
    CHECK(as_rrep(node.sent[1]).path == Route{0, 3, 5});
    CHECK(as_rrep(node.sent[1]).rank == 1);
    CHECK(node.sent[1].link_dst == 3);

    // A late copy of the answered round changes nothing.
    agent.receive(rreq_frame(0, 5, 1, {6}, J(999)));
    q.run_until(SimTime::from_seconds(1.0));
    CHECK(node.sent.size() == 2);
  }

  TEST_CASE("a single candidate yields only a primary reply") {
    EventQueue q;
    FakeNode node(5, q);
    MeaDsrAgent agent(node, RoutingParams{});
    agent.receive(rreq_frame(0, 5, 1, {}, std::nullopt));
    q.run_until(SimTime::from_seconds(1.0));
    REQUIRE(node.sent.size() == 1);
    CHECK(as_rrep(node.sent[0]).path == Route{0, 5});
  }

  TEST_CASE("source discovers, installs both routes and flushes its buffer") {
    EventQueue q;
    FakeNode node(0, q);
    MeaDsrAgent agent(node, RoutingParams{});
    agent.originate_data(packet(1, 0, 5));
    agent.originate_data(packet(2, 0, 5));
    REQUIRE(node.sent.size() == 1);  // one discovery for both packets
    CHECK(node.sent[0].kind == PacketKind::kRreq);
    CHECK(agent.buffered_data() == 2);
    CHECK(agent.discovery_pending(5));
    const std::uint32_t seq = agent.current_seq();

    agent.receive(rrep_frame({0, 9, 5}, seq + 7, 0, 1));  // wrong round
    CHECK_FALSE(agent.route_to(5));

    agent.receive(rrep_frame({0, 1, 2, 5}, seq, 0, 1));
    REQUIRE(agent.route_to(5));
    CHECK(agent.buffered_data() == 0);
    CHECK_FALSE(agent.discovery_pending(5));
    REQUIRE(node.sent.size() == 3);
    for (std::size_t i : {1u, 2u}) {
      CHECK(node.sent[i].kind == PacketKind::kData);
      CHECK(node.sent[i].link_dst == 1);
    }
    agent.receive(rrep_frame({0, 3, 5}, seq, 1, 1));
    CHECK(agent.cache().get(5, MeaRouteCache::Slot::kAlternate) == Route{0, 3, 5});
  }

  TEST_CASE("discovery retries with doubling backoff") {
    EventQueue q;
    FakeNode node(0, q);
    MeaDsrAgent agent(node, RoutingParams{});
    agent.originate_data(packet(1, 0, 5));
    q.run_until(SimTime::from_seconds(0.5));
    CHECK(node.sent.size() == 2);
    q.run_until(SimTime::from_seconds(1.4));
    CHECK(node.sent.size() == 2);
    q.run_until(SimTime::from_seconds(1.5));
    CHECK(node.sent.size() == 3);
    CHECK(agent.current_seq() == 3);
  }

  TEST_CASE("a broken link at an intermediate drops the packet and reports back") {
    EventQueue q;
    FakeNode node(2, q);
    MeaDsrAgent agent(node, RoutingParams{});
    DataPacket p = packet(8, 0, 3);
    p.path = {0, 1, 2, 3};
    p.holder = 2;
    agent.link_failed(make_frame(2, 3, p, 8));
    CHECK(node.count(TraceAction::kDrop, PacketKind::kData) == 1);
    CHECK(node.trace.front().reason == DropReason::kTout);
    REQUIRE(node.sent.size() == 1);
    const auto& rerr = std::get<RouteError>(node.sent[0].payload);
    CHECK(rerr.path == Route{2, 1, 0});
    CHECK(rerr.broken == Link{2, 3});
    CHECK(node.sent[0].link_dst == 1);
  }

  TEST_CASE("route error at the source purges and restarts discovery") {
    EventQueue q;
    FakeNode node(0, q);
    MeaDsrAgent agent(node, RoutingParams{});
    agent.originate_data(packet(1, 0, 5));
    agent.receive(rrep_frame({0, 1, 2, 5}, agent.current_seq(), 0, 1));
    const std::size_t before = node.sent.size();
    RouteError e;
    e.reporter = 1;
    e.broken = {1, 2};
    e.path = {1, 0};
    agent.receive(make_frame(1, 0, e, 77));
    CHECK_FALSE(agent.route_to(5));
    REQUIRE(node.sent.size() == before + 1);
    CHECK(node.sent.back().kind == PacketKind::kRreq);
  }

  TEST_CASE("shutdown drops buffered data") {
    EventQueue q;
    FakeNode node(0, q);
    MeaDsrAgent agent(node, RoutingParams{});
    agent.originate_data(packet(1, 0, 5));
    agent.shutdown();
    CHECK(agent.buffered_data() == 0);
    CHECK(node.trace.back().reason == DropReason::kNodeDead);
    q.run_until(SimTime::from_seconds(60));
    CHECK(node.sent.size() == 1);
  }
}
