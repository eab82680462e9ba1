#include "grf/commands.hpp"

#include <fstream>
#include <ostream>

#include "grf/pipeline.hpp"

namespace grf {

void cmd_synth(const SynthOptions& options, std::ostream& diag) {
  const DatasetIndex index = synth_generate(options.config, options.out_dir);
  diag << "synth: wrote " << index.athletes.size() << " athletes, "
       << index.collections.size() << " collections, "
       << index.measurement_count() << " measurements to "
       << options.out_dir.string() << "\n";
}

void cmd_preprocess(const PreprocessOptions& options, std::ostream& diag) {
  const DatasetIndex index = load_manifest(options.manifest);
  std::filesystem::create_directories(options.out_dir);
  PreprocessOutcome outcome = preprocess_dataset(index);
  for (const auto& w : outcome.warnings) diag << "preprocess: warning: " << w << "\n";
  save_step_store(outcome.store, options.out_dir);

  if (options.emit_overlays) {
    std::size_t i = 0;
    const auto& steps = outcome.store.steps;
    while (i < steps.size()) {
      std::size_t j = i;
      while (j < steps.size() &&
             steps[j].measurement_id == steps[i].measurement_id)
        ++j;
      std::ofstream out(options.out_dir /
                        ("overlay_" + steps[i].measurement_id + ".csv"));
      out << "step,sample,acc_shank_norm,grf_z\n";
      for (std::size_t k = i; k < j; ++k) {
        const Eigen::VectorXd shank = steps[k].channel(chan::kAccShankNorm);
        const Eigen::VectorXd gz = steps[k].channel(chan::kGrfZ);
        for (Eigen::Index s = 0; s < Step::kSamples; ++s)
          out << steps[k].index_in_measurement << ',' << s << ',' << shank[s]
              << ',' << gz[s] << '\n';
      }
      i = j;
    }
  }

  diag << "preprocess: " << outcome.store.steps.size() << " steps from "
       << index.measurement_count() << " measurements ("
       << outcome.warnings.size() << " skipped) -> "
       << options.out_dir.string() << "\n";
}

nlohmann::ordered_json run_config_to_json(const RunConfig& config) {
  nlohmann::ordered_json j;
  j["steps_dir"] = config.steps_dir.string();
  j["out_dir"] = config.out_dir.string();
  auto names = [](const auto& values) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& v : values) arr.push_back(to_string(v));
    return arr;
  };
  j["scenarios"] = names(config.scenarios);
  j["sensors"] = names(config.sensors);
  j["methods"] = names(config.methods);
  j["athletes"] = config.athletes;
  j["seed"] = config.seed;
  j["full_grids"] = config.full_grids;
  j["knn_weighting"] = to_string(config.knn_weighting);
  j["net_impulse"] = to_string(config.net_impulse);
  return j;
}

void cmd_run(const RunConfig& config, std::ostream& diag) {
  const StepStore store = load_step_store(config.steps_dir);
  if (store.steps.empty())
    fail(ErrorCode::MissingFile, "step store is empty: " + config.steps_dir.string());

  std::vector<std::string> athletes = config.athletes;
  if (athletes.empty()) athletes = store.athlete_ids();
  const Grids grids = config.full_grids ? full_grids() : default_grids();

  std::filesystem::create_directories(config.out_dir / "reports");
  std::filesystem::create_directories(config.out_dir / "tables");
  const nlohmann::ordered_json config_echo = run_config_to_json(config);

  std::vector<EvalReport> reports;
  for (const Scenario scenario : config.scenarios) {
    for (const SensorSet sensors : config.sensors) {
      for (const Method method : config.methods) {
        for (const auto& athlete : athletes) {
          TaskSpec task;
          task.scenario = scenario;
          task.sensors = sensors;
          task.method = method;
          task.target_athlete = athlete;
          task.seed = config.seed;
          diag << "run: " << task.name() << "\n";
          EvalReport report = run_task(store, task, grids, config.knn_weighting,
                                       config.net_impulse);
          diag << "run: " << task.name() << " rmse_z=" << report.waveform.rmse_z
               << " rrmse_z=" << report.waveform.rrmse_z << " ("
               << report.fit_seconds + report.predict_seconds << " s)\n";

          nlohmann::ordered_json j = report_to_json(report);
          j["run_config"] = config_echo;
          std::ofstream out(config.out_dir / "reports" /
                            ("report_" + task.name() + ".json"));
          if (!out)
            fail(ErrorCode::MissingFile,
                 "cannot write report for " + task.name());
          out << j.dump(1) << "\n";
          reports.push_back(std::move(report));
        }
      }
    }
  }

  report_tables(reports, config.out_dir / "tables", &config_echo);

  // Wall-clock timings are the one non-reproducible output; they live in
  // their own file so report files stay byte-identical across reruns.
  std::ofstream timings(config.out_dir / "timings.csv");
  timings << "# run_config: " << config_echo.dump() << "\n"
          << "task,fit_seconds,predict_seconds\n";
  for (const auto& r : reports)
    timings << r.task.name() << ',' << r.fit_seconds << ',' << r.predict_seconds
            << '\n';

  diag << "run: wrote " << reports.size() << " reports to "
       << (config.out_dir / "reports").string() << "\n";
}

}  // namespace grf
