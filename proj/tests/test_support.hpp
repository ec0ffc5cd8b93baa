#pragma once

#include <map>
#include <vector>

#include "meadsr/routing.hpp"
#include "meadsr/sim_core.hpp"
#include "meadsr/trace.hpp"

namespace meadsr::testing {

/// Scriptable host for a single routing agent: frames handed to transmit()
/// are captured instead of going on the air.
class FakeNode final : public NodeContext {
 public:
  FakeNode(NodeId id, EventQueue& events) : id_(id), events_(events) {}

  NodeId self() const override { return id_; }
  SimTime now() const override { return events_.now(); }
  Energy residual_energy() const override { return residual; }
  void transmit(Frame frame) override { sent.push_back(std::move(frame)); }
  EventHandle schedule_after(SimTime delay, std::function<void()> fn) override {
    return events_.schedule_after(delay, std::move(fn));
  }
  void cancel(EventHandle handle) override { events_.cancel(handle); }
  std::uint64_t new_uid() override { return next_uid++; }
  void record(const TraceEvent& ev) override { trace.push_back(ev); }
  void deliver_to_app(const DataPacket& pkt) override { delivered.push_back(pkt); }

  std::size_t count(TraceAction action, PacketKind kind) const {
    std::size_t n = 0;
    for (const TraceEvent& ev : trace) n += ev.action == action && ev.kind == kind;
    return n;
  }

  Energy residual = Energy::from_joules(1000.0);
  std::vector<Frame> sent;
  std::vector<TraceEvent> trace;
  std::vector<DataPacket> delivered;
  std::uint64_t next_uid = 1000;

 private:
  NodeId id_;
  EventQueue& events_;
};

inline Frame make_frame(NodeId from, NodeId to, Payload payload, std::uint64_t uid = 1) {
  Frame f;
  f.kind = kind_of(payload);
  f.link_src = from;
  f.link_dst = to;
  f.size = frame_size(payload);
  f.uid = uid;
  f.payload = std::move(payload);
  return f;
}

inline Frame rreq_frame(NodeId src, NodeId dest, std::uint32_t seq, Route route,
                        std::optional<Energy> min_bat = std::nullopt) {
  RouteRequest r;
  r.src = src;
  r.dest = dest;
  r.seq = seq;
  r.route = std::move(route);
  r.min_bat_lev = min_bat;
  const NodeId from = r.route.empty() ? src : r.route.back();
  return make_frame(from, kBroadcast, r);
}

inline Energy J(double joules) { return Energy::from_joules(joules); }

}  // namespace meadsr::testing
