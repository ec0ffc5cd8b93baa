#include "meadsr/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace meadsr {

std::string_view to_string(TraceAction a) {
  switch (a) {
    case TraceAction::kSend: return "s";
    case TraceAction::kRecv: return "r";
    case TraceAction::kForward: return "f";
    case TraceAction::kDrop: return "d";
    case TraceAction::kEnergy: return "e";
  }
  return "?";
}

std::string_view to_string(TraceLayer l) {
  switch (l) {
    case TraceLayer::kAgt: return "AGT";
    case TraceLayer::kRtr: return "RTR";
    case TraceLayer::kMac: return "MAC";
  }
  return "?";
}

std::string_view to_string(DropReason r) {
  switch (r) {
    case DropReason::kIfq: return "IFQ";
    case DropReason::kNrte: return "NRTE";
    case DropReason::kTout: return "TOUT";
    case DropReason::kTtl: return "TTL";
    case DropReason::kCollision: return "COLLISION";
    case DropReason::kNodeDead: return "NODE_DEAD";
  }
  return "?";
}

std::string_view to_string(EnergyRole r) { return r == EnergyRole::kTx ? "tx" : "rx"; }

std::string format_trace_line(const TraceEvent& ev) {
  std::string detail = "-";
  if (ev.action == TraceAction::kEnergy) {
    detail = to_string(ev.role);
  } else if (ev.reason) {
    detail = to_string(*ev.reason);
  }
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s %s %u %s %s %llu %u %s %lld",
                std::string(to_string(ev.action)).c_str(), ev.time.to_string().c_str(), ev.node,
                std::string(to_string(ev.layer)).c_str(), std::string(to_string(ev.kind)).c_str(),
                static_cast<unsigned long long>(ev.uid), ev.size, detail.c_str(),
                static_cast<long long>(ev.energy.nanojoules()));
  return buf;
}

namespace {

template <typename Enum, std::size_t N>
Enum lookup(std::string_view token, const Enum (&values)[N], const char* what) {
  for (Enum v : values) {
    if (to_string(v) == token) return v;
  }
  throw std::invalid_argument(std::string("trace: bad ") + what + " '" + std::string(token) + "'");
}

constexpr TraceAction kActions[] = {TraceAction::kSend, TraceAction::kRecv, TraceAction::kForward,
                                    TraceAction::kDrop, TraceAction::kEnergy};
constexpr TraceLayer kLayers[] = {TraceLayer::kAgt, TraceLayer::kRtr, TraceLayer::kMac};
constexpr PacketKind kKinds[] = {PacketKind::kData, PacketKind::kRreq, PacketKind::kRrep,
                                 PacketKind::kRerr};
constexpr DropReason kReasons[] = {DropReason::kIfq,  DropReason::kNrte,      DropReason::kTout,
                                   DropReason::kTtl,  DropReason::kCollision, DropReason::kNodeDead};
constexpr EnergyRole kRoles[] = {EnergyRole::kTx, EnergyRole::kRx};

}  // namespace

TraceEvent parse_trace_line(std::string_view line) {
  std::istringstream in{std::string(line)};
  std::string action, time, layer, kind, detail;
  TraceEvent ev;
  unsigned long long uid = 0;
  long long nj = 0;
  if (!(in >> action >> time >> ev.node >> layer >> kind >> uid >> ev.size >> detail >> nj)) {
    throw std::invalid_argument("trace: malformed line '" + std::string(line) + "'");
  }
  ev.action = lookup(action, kActions, "action");
  ev.time = SimTime::from_seconds(std::stod(time));
  ev.layer = lookup(layer, kLayers, "layer");
  ev.kind = lookup(kind, kKinds, "kind");
  ev.uid = uid;
  ev.energy = Energy::from_nanojoules(nj);
  if (ev.action == TraceAction::kEnergy) {
    ev.role = lookup(detail, kRoles, "energy role");
  } else if (detail != "-") {
    ev.reason = lookup(detail, kReasons, "drop reason");
  }
  return ev;
}

void TraceWriter::record(const TraceEvent& ev) { out_ << format_trace_line(ev) << '\n'; }

std::vector<TraceEvent> read_trace(std::istream& in) {
  std::vector<TraceEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) events.push_back(parse_trace_line(line));
  }
  return events;
}

}  // namespace meadsr
