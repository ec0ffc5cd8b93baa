#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "meadsr/packets.hpp"
#include "meadsr/sim_core.hpp"

namespace meadsr {

enum class TraceAction : std::uint8_t { kSend, kRecv, kForward, kDrop, kEnergy };
enum class TraceLayer : std::uint8_t { kAgt, kRtr, kMac };
enum class DropReason : std::uint8_t { kIfq, kNrte, kTout, kTtl, kCollision, kNodeDead };
enum class EnergyRole : std::uint8_t { kTx, kRx };

inline constexpr std::size_t kDropReasonCount = 6;

std::string_view to_string(TraceAction a);
std::string_view to_string(TraceLayer l);
std::string_view to_string(DropReason r);
std::string_view to_string(EnergyRole r);

struct TraceEvent {
  SimTime time;
  TraceAction action = TraceAction::kSend;
  TraceLayer layer = TraceLayer::kRtr;
  NodeId node = 0;
  PacketKind kind = PacketKind::kData;
  std::uint64_t uid = 0;
  std::uint32_t size = 0;
  std::optional<DropReason> reason;
  /// Only meaningful for kEnergy records.
  EnergyRole role = EnergyRole::kTx;
  Energy energy;

  bool operator==(const TraceEvent&) const = default;
};

/// One line per event:
///   action time node layer kind uid size detail energy_nj
/// with action in {s,r,f,d,e}; detail is the drop reason, the energy role,
/// or "-".
std::string format_trace_line(const TraceEvent& ev);
TraceEvent parse_trace_line(std::string_view line);

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void record(const TraceEvent& ev) = 0;
};

class TraceWriter final : public TraceSink {
 public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}
  void record(const TraceEvent& ev) override;

 private:
  std::ostream& out_;
};

class TraceBuffer final : public TraceSink {
 public:
  void record(const TraceEvent& ev) override { events.push_back(ev); }
  std::vector<TraceEvent> events;
};

/// Forwards each event to every attached sink, in attach order.
class TraceFanout final : public TraceSink {
 public:
  void attach(TraceSink* sink) {
    if (sink != nullptr) sinks_.push_back(sink);
  }
  void record(const TraceEvent& ev) override {
    for (TraceSink* s : sinks_) s->record(ev);
  }

 private:
  std::vector<TraceSink*> sinks_;
};

std::vector<TraceEvent> read_trace(std::istream& in);

}  // namespace meadsr
