// Command-line front end: single runs and parameter sweeps.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "meadsr/experiment.hpp"

namespace {

using namespace meadsr;

int cmd_run(const std::string& config_path, const std::optional<std::string>& protocol,
            const std::optional<std::uint64_t>& seed, const std::vector<std::string>& overrides, bool trace,
            const std::optional<std::string>& out_dir, const std::optional<std::string>& mobility,
            const std::optional<std::string>& connections) {
  ScenarioConfig cfg = load_config(config_path);
  for (const std::string& o : overrides) apply_override(cfg, o);
  if (protocol) cfg.protocol = parse_protocol(*protocol);
  if (seed) cfg.seed = *seed;
  cfg.validate();

  RunOptions opts;
  opts.trace = trace;
  if (out_dir) opts.out_dir = *out_dir;
  if (mobility) opts.mobility_file = *mobility;
  if (connections) opts.connections_file = *connections;

  const RunOutput out = run_experiment(cfg, opts);
  std::cout << kCsvHeader << '\n' << out.csv_row << '\n' << out.summary;
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& axis_name, const std::string& out_dir,
              const std::optional<std::string>& points, const std::vector<std::string>& overrides, int seeds,
              unsigned jobs) {
  ScenarioConfig cfg = load_config(config_path);
  for (const std::string& o : overrides) apply_override(cfg, o);

  SweepOptions opts;
  opts.axis = parse_axis(axis_name);
  if (points) opts.points = parse_points(opts.axis, *points);
  opts.seeds = seeds;
  opts.jobs = jobs;

  // Fail before the runs if the destination is unusable.
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  const std::filesystem::path csv_path = dir / ("sweep_" + std::string(to_string(opts.axis)) + ".csv");
  std::ofstream csv(csv_path, std::ios::binary);
  if (ec || !csv) {
    std::cerr << "error: cannot write to output directory " << dir.string() << '\n';
    return 2;
  }

  std::size_t failures = 0;
  const auto results = run_sweep(cfg, opts, [&](const SweepResult& r) {
    std::cerr << to_string(opts.axis) << '=' << r.run.point.label << ' ' << to_string(r.run.protocol)
              << " seed " << r.run.seed;
    if (r.report) {
      std::cerr << " done\n";
    } else {
      ++failures;
      std::cerr << " FAILED: " << r.error << '\n';
    }
  });
  csv << sweep_csv(results);
  csv.close();
  if (!csv) {
    std::cerr << "error: failed writing " << csv_path.string() << '\n';
    return 2;
  }
  std::cerr << "wrote " << csv_path.string() << " (" << results.size() << " runs, " << failures << " failed)\n";
  return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MEA-DSR / DSR mobile ad-hoc network simulator"};
  app.require_subcommand(1);

  std::string run_config;
  std::optional<std::string> run_protocol;
  std::optional<std::uint64_t> run_seed;
  std::string run_trace = "on";
  std::optional<std::string> run_out;
  std::optional<std::string> run_mobility;
  std::optional<std::string> run_connections;
  std::vector<std::string> run_sets;
  CLI::App* run = app.add_subcommand("run", "Run one simulation");
  run->add_option("--config", run_config, "Scenario config file (key = value)")->required()->check(CLI::ExistingFile);
  run->add_option("--protocol", run_protocol, "MEA-DSR or DSR");
  run->add_option("--seed", run_seed, "Scenario seed");
  run->add_option("--trace", run_trace, "Write trace.tr (on|off)")->check(CLI::IsMember({"on", "off"}));
  run->add_option("--out", run_out, "Output directory for scenario files, trace, CSV and summary");
  run->add_option("--mobility", run_mobility, "Replay this mobility scenario file")->check(CLI::ExistingFile);
  run->add_option("--connections", run_connections, "Replay this connection file")->check(CLI::ExistingFile);
  run->add_option("--set", run_sets, "Override a config key (key=value), repeatable");

  std::string sweep_config;
  std::string sweep_axis;
  std::string sweep_out;
  std::optional<std::string> sweep_points;
  std::vector<std::string> sweep_sets;
  int sweep_seeds = kSeedsPerPoint;
  unsigned sweep_jobs = 1;
  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter sweep for both protocols");
  sweep->add_option("--config", sweep_config, "Base scenario config file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--axis", sweep_axis, "pause | speed_class | density | rate | sessions | wt")->required();
  sweep->add_option("--out", sweep_out, "Output directory")->required();
  sweep->add_option("--points", sweep_points, "Comma-separated axis values (default: the standard grid)");
  sweep->add_option("--set", sweep_sets, "Override a base config key (key=value), repeatable");
  sweep->add_option("--seeds", sweep_seeds, "Seeds per point")->check(CLI::PositiveNumber);
  sweep->add_option("--jobs", sweep_jobs, "Parallel runs")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return cmd_run(run_config, run_protocol, run_seed, run_sets, run_trace == "on", run_out, run_mobility,
                     run_connections);
    }
    return cmd_sweep(sweep_config, sweep_axis, sweep_out, sweep_points, sweep_sets, sweep_seeds, sweep_jobs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
