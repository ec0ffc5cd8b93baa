#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "meadsr/experiment.hpp"
#include "meadsr/mea_dsr.hpp"
#include "meadsr/metrics.hpp"
#include "meadsr/route_selection.hpp"
#include "meadsr/simulation.hpp"

namespace py = pybind11;
using namespace meadsr;

namespace {

py::dict report_dict(const MetricsReport& r) {
  py::dict d;
  auto opt = [](const std::optional<double>& v) -> py::object { return v ? py::cast(*v) : py::none(); };
  d["srn"] = opt(r.srn);
  d["td"] = r.td;
  d["dm"] = opt(r.dm);
  d["ecp"] = opt(r.ecp);
  d["etecn"] = r.etecn;
  d["term"] = r.term;
  d["data_sent"] = r.data_sent;
  d["data_received"] = r.data_received;
  d["routing_packets"] = r.routing_packets;
  d["total_consumed_j"] = r.total_consumed.joules();
  py::dict drops;
  for (std::size_t i = 0; i < kDropReasonCount; ++i) {
    const auto reason = static_cast<DropReason>(i);
    drops[py::str(std::string(to_string(reason)))] = r.drops.count(reason);
  }
  d["drops"] = drops;
  return d;
}

std::vector<double> joules(const std::vector<Energy>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (Energy e : v) out.push_back(e.joules());
  return out;
}

py::dict result_dict(const SimulationResult& r) {
  py::dict d = report_dict(r.report);
  d["in_flight"] = r.in_flight;
  d["consumed_j"] = joules(r.consumed);
  d["residual_j"] = joules(r.residual);
  d["events_dispatched"] = r.events_dispatched;
  return d;
}

/// Candidates come in as (intermediates, min_bat_lev joules or None, arriving_time seconds).
using PyCandidate = std::tuple<std::vector<NodeId>, std::optional<double>, double>;

std::vector<RouteCandidate> to_candidates(const std::vector<PyCandidate>& in) {
  std::vector<RouteCandidate> out;
  out.reserve(in.size());
  for (const auto& [mids, bat, t] : in) {
    RouteCandidate c;
    c.intermediates = mids;
    if (bat) c.min_bat_lev = Energy::from_joules(*bat);
    c.arriving_time = SimTime::from_seconds(t);
    out.push_back(std::move(c));
  }
  return out;
}

class LineCollector final : public TraceSink {
 public:
  void record(const TraceEvent& ev) override { lines.push_back(format_trace_line(ev)); }
  std::vector<std::string> lines;
};

}  // namespace

PYBIND11_MODULE(_meadsr, m) {
  m.doc() = "Discrete-event MANET simulator comparing MEA-DSR with DSR";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

  py::enum_<Protocol>(m, "Protocol").value("MEA_DSR", Protocol::kMeaDsr).value("DSR", Protocol::kDsr);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("n_nodes", &ScenarioConfig::n_nodes)
      .def_readwrite("area_width", &ScenarioConfig::area_width)
      .def_readwrite("area_height", &ScenarioConfig::area_height)
      .def_readwrite("range", &ScenarioConfig::range)
      .def_readwrite("bitrate", &ScenarioConfig::bitrate)
      .def_readwrite("speed_min", &ScenarioConfig::speed_min)
      .def_readwrite("speed_max", &ScenarioConfig::speed_max)
      .def_readwrite("pause", &ScenarioConfig::pause)
      .def_readwrite("sim_end", &ScenarioConfig::sim_end)
      .def_readwrite("n_connections", &ScenarioConfig::n_connections)
      .def_readwrite("pkt_rate", &ScenarioConfig::pkt_rate)
      .def_readwrite("pkt_size", &ScenarioConfig::pkt_size)
      .def_readwrite("tx_power", &ScenarioConfig::tx_power)
      .def_readwrite("rx_power", &ScenarioConfig::rx_power)
      .def_readwrite("initial_energy", &ScenarioConfig::initial_energy)
      .def_readwrite("wt", &ScenarioConfig::wt)
      .def_readwrite("protocol", &ScenarioConfig::protocol)
      .def_readwrite("seed", &ScenarioConfig::seed)
      .def("validate", &ScenarioConfig::validate)
      .def("set", [](ScenarioConfig& c, const std::string& kv) { apply_override(c, kv); },
           "Apply one key=value override.")
      .def("__eq__", [](const ScenarioConfig& a, const ScenarioConfig& b) { return a == b; })
      .def("__repr__", [](const ScenarioConfig& c) { return "ScenarioConfig(\n" + serialize_config(c) + ")"; });

  m.def("parse_config", [](const std::string& text) { return parse_config(text); }, py::arg("text"));
  m.def("serialize_config", &serialize_config, py::arg("config"));

  m.def(
      "simulate",
      [](const ScenarioConfig& config, bool trace) {
        LineCollector lines;
        SimulationResult r;
        {
          py::gil_scoped_release release;
          r = simulate(config, trace ? &lines : nullptr);
          check_run_invariants(r);
        }
        py::dict d = result_dict(r);
        if (trace) d["trace"] = lines.lines;
        return d;
      },
      py::arg("config"), py::arg("trace") = false,
      "Run one simulation; returns metrics, per-node energy and optionally the trace lines.");

  m.def(
      "run_experiment",
      [](const ScenarioConfig& config, std::optional<std::filesystem::path> out_dir, bool trace) {
        RunOptions o;
        o.out_dir = std::move(out_dir);
        o.trace = trace;
        RunOutput out;
        {
          py::gil_scoped_release release;
          out = run_experiment(config, o);
        }
        py::dict d = result_dict(out.result);
        d["csv_row"] = out.csv_row;
        d["summary"] = out.summary;
        return d;
      },
      py::arg("config"), py::arg("out_dir") = py::none(), py::arg("trace") = true);

  m.def(
      "sweep",
      [](const ScenarioConfig& base, const std::string& axis, std::optional<std::string> points, int seeds,
         unsigned jobs) {
        SweepOptions o;
        o.axis = parse_axis(axis);
        if (points) o.points = parse_points(o.axis, *points);
        o.seeds = seeds;
        o.jobs = jobs;
        py::gil_scoped_release release;
        return sweep_csv(run_sweep(base, o));
      },
      py::arg("base"), py::arg("axis"), py::arg("points") = py::none(), py::arg("seeds") = kSeedsPerPoint,
      py::arg("jobs") = 1, "Run a sweep and return its CSV text.");

  m.def(
      "select_primary_route",
      [](const std::vector<PyCandidate>& cands) { return select_primary_route(to_candidates(cands)); },
      py::arg("candidates"), "Index of the primary route among (intermediates, min_bat_lev, arriving_time) tuples.");
  m.def(
      "select_alternate_route",
      [](const std::vector<PyCandidate>& cands, std::size_t primary) {
        return select_alternate_route(to_candidates(cands), primary);
      },
      py::arg("candidates"), py::arg("primary"));
  m.def("shared_intermediates", &shared_intermediates, py::arg("a"), py::arg("b"));

  m.def(
      "update_min_bat_lev",
      [](std::optional<double> field, double residual) {
        RouteRequest r;
        if (field) r.min_bat_lev = Energy::from_joules(*field);
        return update_min_bat_lev(r, Energy::from_joules(residual)).min_bat_lev->joules();
      },
      py::arg("field"), py::arg("residual"));

  m.def(
      "mobility_scenario",
      [](const ScenarioConfig& config) {
        std::ostringstream out;
        make_mobility(config).write(out);
        return out.str();
      },
      py::arg("config"), "Random waypoint scenario for the config, in the scenario file format.");
  m.def(
      "connections",
      [](const ScenarioConfig& config) {
        std::ostringstream out;
        write_connections(out, make_connections(config));
        return out.str();
      },
      py::arg("config"), "CBR connections for the config, in the connection file format.");

  m.def(
      "metrics_from_trace",
      [](const std::vector<std::string>& lines) {
        std::vector<TraceEvent> events;
        events.reserve(lines.size());
        for (const auto& l : lines) events.push_back(parse_trace_line(l));
        const DeliveryMetrics d = compute_delivery_metrics(events);
        py::dict out;
        out["srn"] = d.srn ? py::cast(*d.srn) : py::none();
        out["td"] = d.td;
        out["dm"] = d.dm ? py::cast(*d.dm) : py::none();
        out["data_sent"] = d.data_sent;
        out["data_received"] = d.data_received;
        out["routing_packets"] = d.routing_packets;
        return out;
      },
      py::arg("lines"), "Delivery metrics recomputed from trace lines.");
}
