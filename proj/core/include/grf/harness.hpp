#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grf/biomech.hpp"
#include "grf/dataset.hpp"
#include "grf/knn.hpp"
#include "grf/metrics.hpp"
#include "grf/ser.hpp"

namespace grf {

enum class Method { Ser, Knn };

inline constexpr std::array<Method, 2> kAllMethods = {Method::Ser, Method::Knn};

std::string to_string(Method m);
/// Parses a method name. "lstm" is recognized but reported as an
/// unimplemented method; anything else is an invalid argument.
Method method_from_string(const std::string& name);

/// One prediction task: (scenario, sensors, method) applied to a target
/// athlete. The test collection defaults to a seeded pick among the
/// target's collections.
struct TaskSpec {
  Scenario scenario = Scenario::Others;
  SensorSet sensors = SensorSet::All;
  Method method = Method::Ser;
  std::string target_athlete;
  std::string test_collection;  // empty = derive from seed
  std::uint64_t seed = 1;

  std::string name() const {
    return to_string(scenario) + "_" + to_string(sensors) + "_" +
           to_string(method) + "_" + target_athlete;
  }
};

/// Hyperparameter search grids. Selection walks batch sizes ascending and,
/// within a batch size, regularization strong-to-weak and k ascending, so
/// score ties resolve toward the simpler model.
struct Grids {
  std::vector<int> batch_sizes;
  std::vector<double> lambda1;
  std::vector<double> lambda2;
  std::vector<int> neighbor_counts;
};

/// Reduced grids sized for a single-core sweep; the CLI default.
Grids default_grids();
/// The full selection grids: S in {2,3,5,6,10,12,15,20,30,60}, lambdas in
/// {0} plus a 7-point logarithmic grid over [1e-6, 1], k in {1,2,5,10,20,40}.
Grids full_grids();

struct HyperChoice {
  int steps_per_row = 5;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int k = 0;  // KNN only
  double validation_rmse_z = 0.0;
  int folds_used = 0;
  int folds_skipped = 0;
};

/// Mean validation RMSE of the vertical GRF over the plan's folds for every
/// grid point; returns the argmin. Infeasible folds are skipped with a
/// warning; selection fails only when no fold is usable. `ranked`, when
/// given, receives every scored candidate best-first (run_task falls back
/// along it if the final fit of a candidate does not converge).
HyperChoice select_hyperparams(const StepStore& store, const TaskSpec& task,
                               const Grids& grids, const FoldPlan& folds,
                               std::vector<std::string>* warnings = nullptr,
                               std::vector<HyperChoice>* ranked = nullptr);

struct WaveformErrors {
  double rmse_x = 0.0, rmse_y = 0.0, rmse_z = 0.0;
  double rrmse_x = 0.0, rrmse_y = 0.0, rrmse_z = 0.0;
  int steps = 0;           // steps averaged
  int zero_range_skips = 0;
};

struct NeighborRef {
  int row = -1;
  double distance = 0.0;
  double weight = 0.0;
  std::string measurement_id;
  std::vector<std::string> step_ids;
};

struct ProvenanceSample {
  int query_row = -1;
  std::vector<NeighborRef> neighbors;
};

struct OverlaySeries {
  std::string step_id;
  Eigen::VectorXd measured_gz;   // 200 samples
  Eigen::VectorXd predicted_gz;  // 200 samples
};

struct EvalReport {
  TaskSpec task;
  std::string test_collection;
  HyperChoice chosen;
  std::vector<std::string> warnings;
  int train_steps = 0, eval_steps = 0;
  int train_rows = 0, eval_rows = 0;
  WaveformErrors waveform;
  /// KNN only: waveform errors under the other weighting mode.
  std::optional<WaveformErrors> alt_weighting_waveform;
  std::map<std::string, MapeResult> biomech_mape;
  /// Net vertical impulse under the other subtraction mode.
  MapeResult net_impulse_alt;
  int biomech_failed_steps = 0;
  std::vector<ProvenanceSample> provenance_samples;  // KNN only
  std::vector<OverlaySeries> overlays;
  double fit_seconds = 0.0;      // wall clock; never serialized into reports
  double predict_seconds = 0.0;
};

/// Hyperparameter selection on the fold plan, final fit on the scenario's
/// full training split, prediction of the held-out collection, waveform and
/// biomechanical evaluation. Deterministic given the task seed.
EvalReport run_task(const StepStore& store, const TaskSpec& task,
                    const Grids& grids,
                    KnnWeighting knn_weighting = KnnWeighting::InverseDistance,
                    NetImpulseMode impulse_mode = NetImpulseMode::LiteralMinusOne);

/// Report JSON (excludes wall-clock timings so reruns are byte-identical).
nlohmann::ordered_json report_to_json(const EvalReport& report);

/// Emits the sensor-set x (scenario x method) matrices as CSV and JSON
/// (cells average over target athletes), the per-variable MAPE table, and
/// one overlay CSV per report. `config_echo`, when given, is embedded in
/// tables.json and as a leading comment line in every CSV.
void report_tables(const std::vector<EvalReport>& reports,
                   const std::filesystem::path& out_dir,
                   const nlohmann::ordered_json* config_echo = nullptr);

}  // namespace grf
