#include "meadsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "meadsr/radio_mac.hpp"

namespace meadsr {

std::uint64_t DropCensus::total() const { return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}); }

void MetricsCollector::record(const TraceEvent& ev) {
  switch (ev.action) {
    case TraceAction::kEnergy:
      if (ev.node >= energy_by_node_.size()) energy_by_node_.resize(ev.node + 1);
      energy_by_node_[ev.node] += ev.energy;
      return;
    case TraceAction::kDrop:
      if (ev.kind == PacketKind::kData && ev.reason) ++drops_.counts[static_cast<std::size_t>(*ev.reason)];
      return;
    case TraceAction::kSend:
    case TraceAction::kForward:
      if (ev.layer == TraceLayer::kRtr && ev.kind != PacketKind::kData) ++routing_packets_;
      if (ev.action == TraceAction::kSend && ev.layer == TraceLayer::kAgt && ev.kind == PacketKind::kData) {
        ++data_sent_;
        auto [it, fresh] = first_send_.emplace(ev.uid, ev.time);
        if (!fresh && ev.time < it->second) it->second = ev.time;
      }
      return;
    case TraceAction::kRecv:
      if (ev.layer == TraceLayer::kAgt && ev.kind == PacketKind::kData) {
        ++data_received_;
        if (first_send_.count(ev.uid) == 0) ++orphan_receives_;
        auto [it, fresh] = last_recv_.emplace(ev.uid, ev.time);
        if (!fresh && ev.time > it->second) it->second = ev.time;
      }
      return;
  }
}

DeliveryMetrics MetricsCollector::delivery() const {
  DeliveryMetrics m;
  m.data_sent = data_sent_;
  m.data_received = data_received_;
  m.routing_packets = routing_packets_;
  m.td = data_sent_ == 0 ? 0.0 : static_cast<double>(data_received_) / static_cast<double>(data_sent_);
  if (data_received_ == 0) return m;
  m.srn = static_cast<double>(routing_packets_) / static_cast<double>(data_received_);
  std::int64_t delay_us = 0;
  std::uint64_t counted = 0;
  for (const auto& [uid, recv] : last_recv_) {
    auto s = first_send_.find(uid);
    if (s == first_send_.end()) continue;
    const std::int64_t d = (recv - s->second).micros();
    if (d > 0) {
      delay_us += d;
      ++counted;
    }
  }
  if (counted > 0) m.dm = static_cast<double>(delay_us) / 1e6 / static_cast<double>(counted);
  return m;
}

DeliveryMetrics compute_delivery_metrics(std::span<const TraceEvent> trace) {
  MetricsCollector c;
  for (const TraceEvent& ev : trace) c.record(ev);
  return c.delivery();
}

DropCensus drop_census(std::span<const TraceEvent> trace) {
  MetricsCollector c;
  for (const TraceEvent& ev : trace) c.record(ev);
  return c.drops();
}

double population_stddev(std::span<const Energy> values) {
  if (values.empty()) return 0.0;
  __int128 sum = 0;
  __int128 sum_sq = 0;
  for (Energy e : values) {
    const __int128 v = e.nanojoules();
    sum += v;
    sum_sq += v * v;
  }
  const auto n = static_cast<__int128>(values.size());
  // N^2 * variance, in nJ^2.
  const __int128 scaled = n * sum_sq - sum * sum;
  const double variance_nj2 = static_cast<double>(scaled) / static_cast<double>(n * n);
  return std::sqrt(std::max(0.0, variance_nj2)) / 1e9;
}

EnergyMetrics compute_energy_metrics(std::span<const Energy> consumed, std::span<const Energy> residual,
                                     Energy initial, std::uint64_t data_received) {
  EnergyMetrics m;
  for (Energy e : consumed) m.total_consumed += e;
  if (data_received > 0) m.ecp = m.total_consumed.joules() / static_cast<double>(data_received);
  m.etecn = population_stddev(consumed);
  if (!residual.empty() && initial > Energy{}) {
    const Energy min_res = *std::min_element(residual.begin(), residual.end());
    m.term = static_cast<double>(min_res.nanojoules()) / static_cast<double>(initial.nanojoules());
  }
  return m;
}

EnergyMetrics compute_energy_metrics(const EnergyLedger& ledger, std::uint64_t data_received) {
  const std::vector<Energy> consumed = ledger.consumed_all();
  const std::vector<Energy> residual = ledger.residual_all();
  return compute_energy_metrics(consumed, residual, ledger.initial(), data_received);
}

MetricsReport make_report(const DeliveryMetrics& d, const EnergyMetrics& e, const DropCensus& drops) {
  MetricsReport r;
  r.srn = d.srn;
  r.td = d.td;
  r.dm = d.dm;
  r.ecp = e.ecp;
  r.etecn = e.etecn;
  r.term = e.term;
  r.data_sent = d.data_sent;
  r.data_received = d.data_received;
  r.routing_packets = d.routing_packets;
  r.drops = drops;
  r.total_consumed = e.total_consumed;
  return r;
}

namespace {

std::string fmt_opt(const std::optional<double>& v) {
  if (!v) return "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", *v);
  return buf;
}

}  // namespace

std::string csv_metric_fields(const MetricsReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%s,%.6f,%s,%s,%.6f,%.6f,%llu,%llu,%llu,%llu,%llu,%llu,%llu", fmt_opt(r.srn).c_str(),
                r.td, fmt_opt(r.dm).c_str(), fmt_opt(r.ecp).c_str(), r.etecn, r.term,
                static_cast<unsigned long long>(r.data_sent), static_cast<unsigned long long>(r.data_received),
                static_cast<unsigned long long>(r.routing_packets),
                static_cast<unsigned long long>(r.drops.count(DropReason::kIfq)),
                static_cast<unsigned long long>(r.drops.count(DropReason::kNrte)),
                static_cast<unsigned long long>(r.drops.count(DropReason::kTout)),
                static_cast<unsigned long long>(r.drops.count(DropReason::kTtl)));
  return buf;
}

void print_summary(std::ostream& out, const MetricsReport& r) {
  auto pct = [](double v) { return fmt_opt(v * 100.0); };
  out << "packet delivery fraction " << pct(r.td) << '\n'
      << "TOUT " << r.drops.count(DropReason::kTout) << '\n'
      << "Ttl " << r.drops.count(DropReason::kTtl) << '\n'
      << "NTRE " << r.drops.count(DropReason::kNrte) << '\n'
      << "IFQ " << r.drops.count(DropReason::kIfq) << '\n'
      << "normalized routing overhead " << fmt_opt(r.srn) << '\n'
      << "average end to end delay " << fmt_opt(r.dm) << '\n'
      << "energy consumed per packet " << fmt_opt(r.ecp) << '\n'
      << "deviation " << fmt_opt(r.etecn) << '\n'
      << "minimal residual energy " << pct(r.term) << '\n';
}

}  // namespace meadsr
