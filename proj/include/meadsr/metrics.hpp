#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "meadsr/packets.hpp"
#include "meadsr/trace.hpp"

namespace meadsr {

class EnergyLedger;

/// DATA drops per reason.
struct DropCensus {
  std::array<std::uint64_t, kDropReasonCount> counts{};

  std::uint64_t count(DropReason r) const { return counts[static_cast<std::size_t>(r)]; }
  std::uint64_t total() const;
  bool operator==(const DropCensus&) const = default;
};

struct DeliveryMetrics {
  std::optional<double> srn;  // control transmissions per delivered packet
  double td = 0.0;            // delivered / sent
  std::optional<double> dm;   // mean end-to-end delay, seconds
  std::uint64_t data_sent = 0;
  std::uint64_t data_received = 0;
  std::uint64_t routing_packets = 0;
};

struct EnergyMetrics {
  std::optional<double> ecp;  // joules per delivered packet
  double etecn = 0.0;         // population std-dev of per-node consumption, joules
  double term = 0.0;          // min residual / initial
  Energy total_consumed;
};

struct MetricsReport {
  std::optional<double> srn;
  double td = 0.0;
  std::optional<double> dm;
  std::optional<double> ecp;
  double etecn = 0.0;
  double term = 0.0;
  std::uint64_t data_sent = 0;
  std::uint64_t data_received = 0;
  std::uint64_t routing_packets = 0;
  DropCensus drops;
  Energy total_consumed;
};

/// Streaming trace analysis; feeding it every event of a run is equivalent
/// to post-processing the trace file.
class MetricsCollector final : public TraceSink {
 public:
  explicit MetricsCollector(std::size_t nodes = 0) : energy_by_node_(nodes) {}

  void record(const TraceEvent& ev) override;

  DeliveryMetrics delivery() const;
  const DropCensus& drops() const { return drops_; }
  /// Per-node energy summed from energy records.
  const std::vector<Energy>& energy_by_node() const { return energy_by_node_; }
  std::uint64_t data_sent() const { return data_sent_; }
  std::uint64_t data_received() const { return data_received_; }
  /// A DATA recv at AGT whose uid had no earlier AGT send.
  std::uint64_t orphan_receives() const { return orphan_receives_; }

 private:
  std::uint64_t data_sent_ = 0;
  std::uint64_t data_received_ = 0;
  std::uint64_t routing_packets_ = 0;
  std::uint64_t orphan_receives_ = 0;
  std::unordered_map<std::uint64_t, SimTime> first_send_;
  std::unordered_map<std::uint64_t, SimTime> last_recv_;
  DropCensus drops_;
  std::vector<Energy> energy_by_node_;
};

DeliveryMetrics compute_delivery_metrics(std::span<const TraceEvent> trace);
DropCensus drop_census(std::span<const TraceEvent> trace);

EnergyMetrics compute_energy_metrics(std::span<const Energy> consumed, std::span<const Energy> residual,
                                     Energy initial, std::uint64_t data_received);
EnergyMetrics compute_energy_metrics(const EnergyLedger& ledger, std::uint64_t data_received);

/// Population standard deviation in joules, exact up to the final sqrt.
double population_stddev(std::span<const Energy> values);

MetricsReport make_report(const DeliveryMetrics& d, const EnergyMetrics& e, const DropCensus& drops);

inline constexpr const char* kCsvHeader =
    "axis_value,protocol,seed,srn,td,dm,ecp,etecn,term,data_sent,data_received,routing_packets,"
    "drop_ifq,drop_nrte,drop_tout,drop_ttl";

/// Metric columns of a CSV row (everything after `seed`); undefined values print as NA.
std::string csv_metric_fields(const MetricsReport& r);

/// Human-readable summary in the layout of the classic AWK analysis.
void print_summary(std::ostream& out, const MetricsReport& r);

}  // namespace meadsr
