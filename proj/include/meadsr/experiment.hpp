#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "meadsr/metrics.hpp"
#include "meadsr/scenario.hpp"
#include "meadsr/simulation.hpp"

namespace meadsr {

/// Thrown when a finished run breaks energy conservation or packet accounting.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws InvariantViolation describing the first broken identity.
void check_run_invariants(const SimulationResult& r);

struct RunOptions {
  bool trace = true;
  /// Where config, scenario files, trace, CSV and summary go; nothing is written when unset.
  std::optional<std::filesystem::path> out_dir;
  /// Replay files instead of generating mobility / traffic from the seed.
  std::optional<std::filesystem::path> mobility_file;
  std::optional<std::filesystem::path> connections_file;
};

struct RunOutput {
  SimulationResult result;
  std::string csv_row;
  std::string summary;
};

/// One simulation; writes its artifacts when `out_dir` is set.
RunOutput run_experiment(const ScenarioConfig& config, const RunOptions& options);

std::string csv_row(std::string_view axis_value, Protocol protocol, std::string_view seed, const MetricsReport& r);

struct SweepOptions {
  SweepAxis axis = SweepAxis::kPause;
  std::vector<SweepPoint> points;  // empty selects default_points(axis)
  int seeds = kSeedsPerPoint;
  unsigned jobs = 1;
};

struct SweepResult {
  SweepRun run;
  std::optional<MetricsReport> report;
  std::string error;
};

/// Runs the whole grid; results come back in grid order whatever `jobs` is.
std::vector<SweepResult> run_sweep(const ScenarioConfig& base, const SweepOptions& options,
                                   const std::function<void(const SweepResult&)>& on_done = {});

/// Header, then for every (point, protocol) its per-seed rows followed by a
/// mean row. Failed runs carry ERROR in every metric column; a mean row over
/// an incomplete set of seeds is labelled `mean_partial`.
std::string sweep_csv(const std::vector<SweepResult>& results);

}  // namespace meadsr
