#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "grf/signal.hpp"

namespace grf {

/// Raw measurement channel labels, IMU file order.
const std::vector<std::string>& imu_channel_layout();
/// GRF file channel labels (forces in Newtons).
const std::vector<std::string>& grf_channel_layout();

struct MeasurementInfo {
  std::string id;
  double speed_mps = 0.0;
  std::string imu_file;
  std::string grf_file;
  // Approximate [begin, end] times bracketing the two jump references,
  // generous enough to hold on either clock.
  std::array<std::array<double, 2>, 2> jump_windows{};
};

struct CollectionInfo {
  std::string id;
  std::string athlete_id;
  std::vector<MeasurementInfo> measurements;
};

struct AthleteInfo {
  std::string id;
  double body_weight_newtons = 0.0;
};

struct DatasetIndex {
  std::filesystem::path root;  // directory holding the manifest
  std::vector<AthleteInfo> athletes;
  std::vector<CollectionInfo> collections;
  // Opaque echo of how the dataset was produced (generator parameters).
  nlohmann::ordered_json provenance;

  const AthleteInfo& athlete(const std::string& id) const;
  const CollectionInfo& collection(const std::string& id) const;
  std::size_t measurement_count() const;
};

/// Parses and validates a manifest: schema, unique ids, and existence of
/// every referenced data file.
DatasetIndex load_manifest(const std::filesystem::path& manifest_file);
void save_manifest(const DatasetIndex& index,
                   const std::filesystem::path& manifest_file);

/// CSV with header `t,<channel>...`; time in seconds with 6 decimals,
/// values at full precision.
void save_signal_csv(const SampledSignal& signal,
                     const std::filesystem::path& path);
SampledSignal load_signal_csv(const std::filesystem::path& path);

struct MeasurementData {
  SampledSignal imu;  // 500 Hz
  SampledSignal grf;  // 1000 Hz, Newtons
};

/// Loads and validates both device files of a measurement (rates, channel
/// sets, finite values).
MeasurementData load_measurement(const DatasetIndex& index,
                                 const MeasurementInfo& measurement);

/// All preprocessed steps of a dataset, ordered by athlete, collection,
/// measurement, step index.
struct StepStore {
  std::vector<Step> steps;

  std::vector<std::string> athlete_ids() const;
  std::vector<std::string> collection_ids() const;
  std::vector<std::string> collections_of(const std::string& athlete_id) const;
  std::string athlete_of_collection(const std::string& collection_id) const;
};

void save_step_store(const StepStore& store, const std::filesystem::path& dir);
StepStore load_step_store(const std::filesystem::path& dir);

/// Training-data scenarios for a prediction task.
enum class Scenario { Others, Personal, Everyone };

inline constexpr std::array<Scenario, 3> kAllScenarios = {
    Scenario::Others, Scenario::Personal, Scenario::Everyone};

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

/// Step indices into a StepStore; training and validation are disjoint.
struct ScenarioSplit {
  std::vector<std::uint32_t> train;
  std::vector<std::uint32_t> validation;
};

/// Builds the split for one held-out collection. The held-out collection's
/// athlete is the (possibly simulated) target: OTHERS trains on no step of
/// that athlete, PERSONAL only on their other collections, EVERYONE on the
/// union. `excluded_collections` are removed from every pool (the task's
/// final test collection during fold validation).
ScenarioSplit make_scenario_split(
    const StepStore& store, Scenario scenario,
    const std::string& held_out_collection,
    const std::vector<std::string>& excluded_collections = {});

/// Validation folds for hyperparameter selection: collections drawn
/// deterministically from a seeded shuffle of the eligible ids.
struct FoldPlan {
  std::vector<std::string> validation_collections;
};

FoldPlan make_fold_plan(const StepStore& store, Scenario scenario,
                        const std::string& target_athlete,
                        const std::string& test_collection, std::uint64_t seed,
                        int max_folds = 5);

}  // namespace grf
