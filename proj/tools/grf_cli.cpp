// Command-line driver for the GRF prediction toolkit.
//
// Subcommands:
//   synth       generate a synthetic dataset (manifest + measurement CSVs)
//   preprocess  align, filter, and segment a dataset into a step store
//   run         execute prediction tasks and write reports/tables
//
// Exit codes: 0 success, 2 configuration error, 3 data error,
// 4 numerical failure. Diagnostics go to stderr; machine-readable output
// only to files.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "grf/commands.hpp"

namespace {

template <typename T, typename Parser>
std::vector<T> parse_list(const std::vector<std::string>& names, Parser parse) {
  std::vector<T> out;
  out.reserve(names.size());
  for (const auto& name : names) out.push_back(parse(name));
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GRF waveform prediction from wearable inertial sensors"};
  app.require_subcommand(1);

  // synth
  grf::SynthOptions synth;
  synth.out_dir = "dataset";
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic dataset");
  synth_cmd->add_option("-o,--out", synth.out_dir, "Output directory");
  synth_cmd->add_option("--seed", synth.config.seed, "Generator seed");
  synth_cmd->add_option("--athletes", synth.config.athletes, "Number of athletes");
  synth_cmd->add_option("--collections", synth.config.collections_per_athlete,
                        "Collections per athlete");
  synth_cmd->add_option("--speeds", synth.config.speeds_mps,
                        "Running speeds (m/s), one measurement each");
  synth_cmd->add_option("--steps", synth.config.steps_per_measurement,
                        "Steps per measurement (>= 60)");
  synth_cmd->add_option("--style-period", synth.config.style_period,
                        "Cyclic per-step amplitude pattern period (0 = off)");
  synth_cmd->add_option("--noise-scale", synth.config.noise_scale,
                        "Noise multiplier (1.0 = calibrated default)");

  // preprocess
  grf::PreprocessOptions pre;
  auto* pre_cmd =
      app.add_subcommand("preprocess", "Align, filter, and segment a dataset");
  pre_cmd->add_option("manifest", pre.manifest, "Path to manifest.json")
      ->required();
  pre_cmd->add_option("-o,--out", pre.out_dir, "Step store output directory")
      ->required();
  pre_cmd->add_flag("--emit-overlays", pre.emit_overlays,
                    "Write per-measurement step-overlay CSVs");

  // run
  grf::RunConfig run;
  std::vector<std::string> scenario_names{"others", "personal", "everyone"};
  std::vector<std::string> sensor_names{"all",    "acc",      "ang",    "sacrum",
                                        "shanks", "sac-acc3d", "sac-acc"};
  std::vector<std::string> method_names{"ser", "knn"};
  std::string weighting_name = "inverse-distance";
  std::string impulse_name = "literal-minus-one";
  auto* run_cmd = app.add_subcommand("run", "Run prediction tasks");
  run_cmd->add_option("steps", run.steps_dir, "Step store directory")->required();
  run_cmd->add_option("-o,--out", run.out_dir, "Report output directory")
      ->required();
  run_cmd->add_option("--scenario", scenario_names,
                      "Scenarios: others|personal|everyone");
  run_cmd->add_option("--sensors", sensor_names,
                      "Sensor sets: all|acc|ang|sacrum|shanks|sac-acc3d|sac-acc");
  run_cmd->add_option("--method", method_names, "Methods: ser|knn");
  run_cmd->add_option("--athletes", run.athletes,
                      "Target athletes (default: all in the store)");
  run_cmd->add_option("--seed", run.seed, "Run seed");
  run_cmd->add_flag("--full-grids", run.full_grids,
                    "Search the full hyperparameter grids");
  run_cmd->add_option("--knn-weighting", weighting_name,
                      "inverse-distance|paper-literal");
  run_cmd->add_option("--net-impulse", impulse_name,
                      "literal-minus-one|integral-of-excess");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) {
      grf::cmd_synth(synth, std::cerr);
    } else if (pre_cmd->parsed()) {
      grf::cmd_preprocess(pre, std::cerr);
    } else if (run_cmd->parsed()) {
      run.scenarios =
          parse_list<grf::Scenario>(scenario_names, grf::scenario_from_string);
      run.sensors =
          parse_list<grf::SensorSet>(sensor_names, grf::sensor_set_from_string);
      run.methods =
          parse_list<grf::Method>(method_names, grf::method_from_string);
      run.knn_weighting = grf::knn_weighting_from_string(weighting_name);
      run.net_impulse = grf::net_impulse_mode_from_string(impulse_name);
      grf::cmd_run(run, std::cerr);
    }
  } catch (const grf::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
