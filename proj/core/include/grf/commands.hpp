#pragma once

#include <filesystem>
#include <iosfwd>

#include "grf/harness.hpp"
#include "grf/synth.hpp"

namespace grf {

/// Batch-command implementations behind the CLI. All diagnostics go to the
/// stream; machine-readable output only to files. Errors surface as
/// grf::Error; callers map them to exit codes.

struct SynthOptions {
  SynthConfig config;
  std::filesystem::path out_dir;
};

void cmd_synth(const SynthOptions& options, std::ostream& diag);

struct PreprocessOptions {
  std::filesystem::path manifest;
  std::filesystem::path out_dir;
  /// Also write per-measurement step-overlay CSVs of the aligned shank
  /// acceleration norm and vertical GRF, for visual checks.
  bool emit_overlays = false;
};

void cmd_preprocess(const PreprocessOptions& options, std::ostream& diag);

struct RunConfig {
  std::filesystem::path steps_dir;
  std::filesystem::path out_dir;
  std::vector<Scenario> scenarios{kAllScenarios.begin(), kAllScenarios.end()};
  std::vector<SensorSet> sensors{kAllSensorSets.begin(), kAllSensorSets.end()};
  std::vector<Method> methods{kAllMethods.begin(), kAllMethods.end()};
  std::vector<std::string> athletes;  // empty = every athlete in the store
  std::uint64_t seed = 1;
  bool full_grids = false;
  KnnWeighting knn_weighting = KnnWeighting::InverseDistance;
  NetImpulseMode net_impulse = NetImpulseMode::LiteralMinusOne;
};

nlohmann::ordered_json run_config_to_json(const RunConfig& config);

/// Runs every (scenario, sensors, method, athlete) tuple, writes one report
/// JSON per task plus the aggregate tables and overlay series. Report files
/// embed the RunConfig and seed and are byte-identical across reruns;
/// wall-clock timings go only to `timings.csv` and the diagnostic stream.
void cmd_run(const RunConfig& config, std::ostream& diag);

}  // namespace grf
