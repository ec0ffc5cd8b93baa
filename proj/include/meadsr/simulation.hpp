#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "meadsr/metrics.hpp"
#include "meadsr/mobility.hpp"
#include "meadsr/radio_mac.hpp"
#include "meadsr/routing.hpp"
#include "meadsr/scenario.hpp"
#include "meadsr/sim_core.hpp"
#include "meadsr/trace.hpp"
#include "meadsr/traffic.hpp"

namespace meadsr {

/// Random waypoint scenario for the config, drawn from the "mobility" stream.
MobilityScenario make_mobility(const ScenarioConfig& config);
/// CBR connections for the config, drawn from the "traffic" stream.
std::vector<Connection> make_connections(const ScenarioConfig& config);

RadioConfig radio_config(const ScenarioConfig& config);
RoutingParams routing_params(const ScenarioConfig& config);

struct SimulationResult {
  MetricsReport report;
  /// DATA packets still queued at a MAC or buffered at a source when the run ended.
  std::uint64_t in_flight = 0;
  std::vector<Energy> consumed;
  std::vector<Energy> residual;
  /// Per-node sums of the energy trace records.
  std::vector<Energy> trace_energy;
  Energy initial;
  std::uint64_t orphan_receives = 0;
  std::size_t events_dispatched = 0;
};

/// One complete run: owns the event loop, the shared medium, one routing
/// agent per node and one CBR source per connection.
class Simulation {
 public:
  Simulation(const ScenarioConfig& config, MobilityScenario mobility, std::vector<Connection> connections,
             ProtocolProbe* probe = nullptr);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  /// Extra sinks see every trace event; attach before run().
  void attach_trace(TraceSink* sink) { fanout_.attach(sink); }

  /// Runs to sim_end. May be called once.
  SimulationResult run();

  const ScenarioConfig& config() const { return config_; }
  const MobilityScenario& mobility() const { return mobility_; }
  const std::vector<Connection>& connections() const { return connections_; }
  const RadioMac& mac() const { return *mac_; }
  const SourceRoutingAgent& agent(NodeId n) const;
  SimTime now() const { return events_.now(); }

 private:
  class NodeHost;

  void schedule_emission(std::size_t conn_index);
  void emit(std::size_t conn_index);

  ScenarioConfig config_;
  MobilityScenario mobility_;
  std::vector<Connection> connections_;
  SimTime end_;
  EventQueue events_;
  TraceFanout fanout_;
  MetricsCollector metrics_;
  std::unique_ptr<RadioMac> mac_;
  std::vector<std::unique_ptr<NodeHost>> hosts_;
  std::vector<CbrSource> sources_;
  std::uint64_t next_uid_ = 0;
  bool ran_ = false;
};

/// Generates mobility and traffic from the config and runs it.
SimulationResult simulate(const ScenarioConfig& config, TraceSink* trace = nullptr, ProtocolProbe* probe = nullptr);

}  // namespace meadsr
