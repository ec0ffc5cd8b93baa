#include "meadsr/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

namespace meadsr {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

void check_run_invariants(const SimulationResult& r) {
  const MetricsReport& m = r.report;
  const std::uint64_t accounted = m.data_received + m.drops.total() + r.in_flight;
  if (accounted != m.data_sent) {
    throw InvariantViolation("packet accounting: sent " + std::to_string(m.data_sent) + " != received " +
                             std::to_string(m.data_received) + " + dropped " + std::to_string(m.drops.total()) +
                             " + in flight " + std::to_string(r.in_flight));
  }
  if (r.orphan_receives != 0) {
    throw InvariantViolation(std::to_string(r.orphan_receives) + " deliveries without a matching send");
  }
  const Energy ledger_total = std::accumulate(r.consumed.begin(), r.consumed.end(), Energy{});
  const Energy trace_total = std::accumulate(r.trace_energy.begin(), r.trace_energy.end(), Energy{});
  if (ledger_total != trace_total || r.consumed != r.trace_energy) {
    throw InvariantViolation("energy: ledger " + std::to_string(ledger_total.nanojoules()) + " nJ, trace " +
                             std::to_string(trace_total.nanojoules()) + " nJ");
  }
  for (std::size_t n = 0; n < r.consumed.size(); ++n) {
    if (r.consumed[n] + r.residual[n] != r.initial) {
      throw InvariantViolation("energy: node " + std::to_string(n) + " consumed + residual != initial");
    }
  }
}

std::string csv_row(std::string_view axis_value, Protocol protocol, std::string_view seed, const MetricsReport& r) {
  std::string row(axis_value);
  row += ',';
  row += to_string(protocol);
  row += ',';
  row += seed;
  row += ',';
  row += csv_metric_fields(r);
  return row;
}

RunOutput run_experiment(const ScenarioConfig& config, const RunOptions& options) {
  config.validate();
  MobilityScenario mobility;
  if (options.mobility_file) {
    std::ifstream in(*options.mobility_file);
    if (!in) throw std::runtime_error("cannot read " + options.mobility_file->string());
    mobility = MobilityScenario::read(in);
  } else {
    mobility = make_mobility(config);
  }
  std::vector<Connection> connections;
  if (options.connections_file) {
    std::ifstream in(*options.connections_file);
    if (!in) throw std::runtime_error("cannot read " + options.connections_file->string());
    connections = read_connections(in);
  } else {
    connections = make_connections(config);
  }

  std::optional<std::ofstream> trace_file;
  std::optional<TraceWriter> writer;
  if (options.out_dir) {
    ensure_directory(*options.out_dir);
    open_output(*options.out_dir / "config.txt") << serialize_config(config);
    {
      std::ofstream out = open_output(*options.out_dir / "mobility.txt");
      mobility.write(out);
    }
    {
      std::ofstream out = open_output(*options.out_dir / "connections.txt");
      write_connections(out, connections);
    }
    if (options.trace) {
      trace_file = open_output(*options.out_dir / "trace.tr");
      writer.emplace(*trace_file);
    }
  }

  Simulation sim(config, std::move(mobility), std::move(connections));
  if (writer) sim.attach_trace(&*writer);
  RunOutput out;
  out.result = sim.run();
  if (trace_file) {
    trace_file->flush();
    if (!*trace_file) throw std::runtime_error("failed writing trace file");
  }
  check_run_invariants(out.result);

  out.csv_row = csv_row("-", config.protocol, std::to_string(config.seed), out.result.report);
  std::ostringstream summary;
  print_summary(summary, out.result.report);
  out.summary = summary.str();

  if (options.out_dir) {
    open_output(*options.out_dir / "metrics.csv") << kCsvHeader << '\n' << out.csv_row << '\n';
    open_output(*options.out_dir / "summary.txt") << out.summary;
  }
  return out;
}

std::vector<SweepResult> run_sweep(const ScenarioConfig& base, const SweepOptions& options,
                                   const std::function<void(const SweepResult&)>& on_done) {
  const std::vector<SweepPoint> points = options.points.empty() ? default_points(options.axis) : options.points;
  const std::vector<SweepRun> grid = sweep_grid(base, options.axis, points, options.seeds);
  std::vector<SweepResult> results(grid.size());
  std::atomic<std::size_t> next{0};
  std::mutex report_mutex;

  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      SweepResult& res = results[i];
      res.run = grid[i];
      try {
        RunOptions ro;
        ro.trace = false;
        res.report = run_experiment(grid[i].config, ro).result.report;
      } catch (const std::exception& e) {
        res.error = e.what();
      }
      if (on_done) {
        std::lock_guard lock(report_mutex);
        on_done(res);
      }
    }
  };

  const unsigned jobs = std::max(1u, options.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  return results;
}

std::string sweep_csv(const std::vector<SweepResult>& results) {
  std::string out = kCsvHeader;
  out += '\n';
  const std::size_t metric_columns = split_csv(kCsvHeader).size() - 3;

  std::size_t i = 0;
  while (i < results.size()) {
    const SweepRun& head = results[i].run;
    std::vector<std::vector<std::string>> seed_fields;
    std::size_t expected = 0;
    for (; i < results.size() && results[i].run.point_index == head.point_index &&
           results[i].run.protocol == head.protocol;
         ++i) {
      const SweepResult& r = results[i];
      ++expected;
      const std::string seed = std::to_string(r.run.seed);
      if (r.report) {
        const std::string row = csv_row(r.run.point.label, r.run.protocol, seed, *r.report);
        out += row + '\n';
        auto fields = split_csv(row);
        seed_fields.emplace_back(fields.begin() + 3, fields.end());
      } else {
        out += r.run.point.label + ',' + std::string(to_string(r.run.protocol)) + ',' + seed;
        for (std::size_t c = 0; c < metric_columns; ++c) out += ",ERROR";
        out += '\n';
      }
    }

    // Means are taken over the printed values so they can be re-derived from the file.
    out += head.point.label + ',' + std::string(to_string(head.protocol)) + ',' +
           (seed_fields.size() == expected ? "mean" : "mean_partial");
    for (std::size_t c = 0; c < metric_columns; ++c) {
      double sum = 0.0;
      std::size_t n = 0;
      for (const auto& f : seed_fields) {
        if (f[c] == "NA") continue;
        sum += std::stod(f[c]);
        ++n;
      }
      if (n == 0) {
        out += ",NA";
      } else {
        char buf[64];
        std::snprintf(buf, sizeof buf, ",%.6f", sum / static_cast<double>(n));
        out += buf;
      }
    }
    out += '\n';
  }
  return out;
}

}  // namespace meadsr
