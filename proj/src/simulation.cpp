#include "meadsr/simulation.hpp"

#include <optional>
#include <stdexcept>
#include <string>

#include "meadsr/dsr_baseline.hpp"
#include "meadsr/mea_dsr.hpp"

namespace meadsr {

MobilityScenario make_mobility(const ScenarioConfig& config) {
  RwpParams p;
  p.nodes = config.n_nodes;
  p.width = config.area_width;
  p.height = config.area_height;
  p.speed_min = config.speed_min;
  p.speed_max = config.speed_max;
  p.pause = config.pause;
  p.sim_end = SimTime::from_seconds(config.sim_end);
  RngStream stream(config.seed, "mobility");
  return generate_rwp(p, stream);
}

std::vector<Connection> make_connections(const ScenarioConfig& config) {
  RngStream stream(config.seed, "traffic");
  return generate_connections(config.n_nodes, config.n_connections, config.pkt_rate, stream, config.pkt_size);
}

RadioConfig radio_config(const ScenarioConfig& config) {
  RadioConfig r;
  r.range = config.range;
  r.bitrate = config.bitrate;
  r.tx_power = config.tx_power;
  r.rx_power = config.rx_power;
  return r;
}

RoutingParams routing_params(const ScenarioConfig& config) {
  RoutingParams p;
  p.wait_time = SimTime::from_seconds(config.wt);
  return p;
}

class Simulation::NodeHost final : public NodeContext {
 public:
  NodeHost(Simulation& sim, NodeId id, ProtocolProbe* probe) : sim_(sim), id_(id) {
    const RoutingParams params = routing_params(sim.config_);
    jitter_us_ = params.broadcast_jitter.micros();
    jitter_.emplace(sim.config_.seed, "broadcast-jitter/" + std::to_string(id));
    if (sim.config_.protocol == Protocol::kMeaDsr) {
      agent_ = std::make_unique<MeaDsrAgent>(*this, params, probe);
    } else {
      agent_ = std::make_unique<DsrAgent>(*this, params, probe);
    }
  }

  SourceRoutingAgent& agent() { return *agent_; }

  NodeId self() const override { return id_; }
  SimTime now() const override { return sim_.events_.now(); }
  Energy residual_energy() const override { return sim_.mac_->ledger().residual(id_); }
  void transmit(Frame frame) override {
    if (!frame.is_broadcast() || jitter_us_ <= 0) {
      sim_.mac_->enqueue_frame(id_, std::move(frame));
      return;
    }
    const auto delay = SimTime::from_micros(jitter_->uniform_int(0, jitter_us_ - 1));
    sim_.events_.schedule_after(delay, [this, f = std::move(frame)]() mutable {
      sim_.mac_->enqueue_frame(id_, std::move(f));
    });
  }
  EventHandle schedule_after(SimTime delay, std::function<void()> fn) override {
    return sim_.events_.schedule_after(delay, std::move(fn));
  }
  void cancel(EventHandle handle) override { sim_.events_.cancel(handle); }
  std::uint64_t new_uid() override { return sim_.next_uid_++; }
  void record(const TraceEvent& ev) override { sim_.fanout_.record(ev); }
  void deliver_to_app(const DataPacket& pkt) override {
    TraceEvent ev;
    ev.time = now();
    ev.action = TraceAction::kRecv;
    ev.layer = TraceLayer::kAgt;
    ev.node = id_;
    ev.kind = PacketKind::kData;
    ev.uid = pkt.uid;
    ev.size = pkt.payload_bytes;
    record(ev);
  }

 private:
  Simulation& sim_;
  NodeId id_;
  std::int64_t jitter_us_ = 0;
  std::optional<RngStream> jitter_;
  std::unique_ptr<SourceRoutingAgent> agent_;
};

Simulation::Simulation(const ScenarioConfig& config, MobilityScenario mobility, std::vector<Connection> connections,
                       ProtocolProbe* probe)
    : config_(config),
      mobility_(std::move(mobility)),
      connections_(std::move(connections)),
      end_(SimTime::from_seconds(config.sim_end)),
      metrics_(config.n_nodes) {
  config_.validate();
  if (mobility_.node_count() != config_.n_nodes) {
    throw std::invalid_argument("mobility scenario has " + std::to_string(mobility_.node_count()) +
                                " nodes, config expects " + std::to_string(config_.n_nodes));
  }
  if (mobility_.span_end() < end_) {
    throw std::invalid_argument("mobility scenario ends at " + mobility_.span_end().to_string() +
                                " s, before sim_end");
  }
  for (const Connection& c : connections_) {
    if (c.src >= config_.n_nodes || c.dst >= config_.n_nodes || c.src == c.dst) {
      throw std::invalid_argument("connection " + std::to_string(c.src) + " -> " + std::to_string(c.dst) +
                                  " is not valid for " + std::to_string(config_.n_nodes) + " nodes");
    }
  }
  fanout_.attach(&metrics_);

  RadioMac::Hooks hooks;
  hooks.deliver = [this](NodeId receiver, const Frame& frame) { hosts_[receiver]->agent().receive(frame); };
  hooks.link_failed = [this](NodeId sender, Frame frame) { hosts_[sender]->agent().link_failed(std::move(frame)); };
  hooks.node_died = [this](NodeId node) { hosts_[node]->agent().shutdown(); };
  mac_ = std::make_unique<RadioMac>(radio_config(config_), mobility_, Energy::from_joules(config_.initial_energy),
                                    events_, config_.seed, fanout_, std::move(hooks));

  hosts_.reserve(config_.n_nodes);
  for (NodeId n = 0; n < config_.n_nodes; ++n) hosts_.push_back(std::make_unique<NodeHost>(*this, n, probe));

  sources_.reserve(connections_.size());
  for (std::size_t i = 0; i < connections_.size(); ++i) {
    sources_.emplace_back(connections_[i], RngStream(config_.seed, "traffic/cbr/" + std::to_string(i)));
  }
}

Simulation::~Simulation() = default;

const SourceRoutingAgent& Simulation::agent(NodeId n) const { return hosts_.at(n)->agent(); }

void Simulation::schedule_emission(std::size_t conn_index) {
  if (auto t = sources_[conn_index].next_emission(end_)) {
    events_.schedule(*t, [this, conn_index] { emit(conn_index); });
  }
}

void Simulation::emit(std::size_t conn_index) {
  const Connection& c = connections_[conn_index];
  // A depleted source generates nothing further.
  if (mac_->alive(c.src)) {
    DataPacket pkt;
    pkt.uid = next_uid_++;
    pkt.origin = c.src;
    pkt.dst = c.dst;
    pkt.payload_bytes = c.packet_size;
    pkt.created = events_.now();

    TraceEvent ev;
    ev.time = events_.now();
    ev.action = TraceAction::kSend;
    ev.layer = TraceLayer::kAgt;
    ev.node = c.src;
    ev.kind = PacketKind::kData;
    ev.uid = pkt.uid;
    ev.size = pkt.payload_bytes;
    fanout_.record(ev);

    hosts_[c.src]->agent().originate_data(std::move(pkt));
  }
  schedule_emission(conn_index);
}

SimulationResult Simulation::run() {
  if (ran_) throw SimulationFault("Simulation::run called twice");
  ran_ = true;
  for (std::size_t i = 0; i < sources_.size(); ++i) schedule_emission(i);

  SimulationResult r;
  r.events_dispatched = events_.run_until(end_);

  const EnergyLedger& ledger = mac_->ledger();
  r.consumed = ledger.consumed_all();
  r.residual = ledger.residual_all();
  r.initial = ledger.initial();
  r.trace_energy = metrics_.energy_by_node();
  r.trace_energy.resize(config_.n_nodes);
  r.orphan_receives = metrics_.orphan_receives();

  r.in_flight = mac_->data_frames_held();
  for (const auto& h : hosts_) r.in_flight += h->agent().buffered_data();

  const DeliveryMetrics d = metrics_.delivery();
  const EnergyMetrics e = compute_energy_metrics(ledger, d.data_received);
  r.report = make_report(d, e, metrics_.drops());
  return r;
}

SimulationResult simulate(const ScenarioConfig& config, TraceSink* trace, ProtocolProbe* probe) {
  Simulation sim(config, make_mobility(config), make_connections(config), probe);
  sim.attach_trace(trace);
  return sim.run();
}

}  // namespace meadsr
