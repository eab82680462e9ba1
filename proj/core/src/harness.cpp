#include "grf/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>

#include "grf/elastic_net.hpp"
#include "grf/rng.hpp"

namespace grf {

namespace {

constexpr int kReportFormatVersion = 1;
constexpr int kDefaultRank = 6;
constexpr int kProvenanceSamples = 3;
constexpr int kOverlaySteps = 5;

std::vector<const Step*> gather(const StepStore& store,
                                const std::vector<std::uint32_t>& indices) {
  std::vector<const Step*> ptrs;
  ptrs.reserve(indices.size());
  for (const auto i : indices) ptrs.push_back(&store.steps[i]);
  return ptrs;
}

DesignMatrices assemble(const std::vector<const Step*>& ptrs, int steps_per_row,
                        SensorSet sensors) {
  return assemble_matrices(
      std::span<const Step* const>(ptrs.data(), ptrs.size()), steps_per_row,
      sensors);
}

RankPolicy clamped_rank(const Eigen::MatrixXd& m) {
  return RankPolicy::fixed(static_cast<int>(
      std::min<Eigen::Index>(kDefaultRank, std::min(m.rows(), m.cols()))));
}

Eigen::Index grf_component_offset(int step, int component) {
  return static_cast<Eigen::Index>(step) * 3 * Step::kSamples +
         static_cast<Eigen::Index>(component) * Step::kSamples;
}

/// Mean per-step RMSE of the vertical component across all rows.
double mean_step_rmse_z(const Eigen::MatrixXd& truth,
                        const Eigen::MatrixXd& pred, int steps_per_row) {
  double acc = 0.0;
  int count = 0;
  for (Eigen::Index r = 0; r < truth.rows(); ++r) {
    for (int s = 0; s < steps_per_row; ++s) {
      const auto off = grf_component_offset(s, 2);
      acc += rmse(truth.row(r).segment(off, Step::kSamples).transpose(),
                  pred.row(r).segment(off, Step::kSamples).transpose());
      ++count;
    }
  }
  return acc / count;
}

WaveformErrors waveform_errors(const Eigen::MatrixXd& truth,
                               const Eigen::MatrixXd& pred, int steps_per_row) {
  WaveformErrors w;
  double rm[3] = {0, 0, 0};
  double rr[3] = {0, 0, 0};
  int rr_counts[3] = {0, 0, 0};
  for (Eigen::Index r = 0; r < truth.rows(); ++r) {
    for (int s = 0; s < steps_per_row; ++s) {
      for (int d = 0; d < 3; ++d) {
        const auto off = grf_component_offset(s, d);
        const Eigen::VectorXd t = truth.row(r).segment(off, Step::kSamples);
        const Eigen::VectorXd p = pred.row(r).segment(off, Step::kSamples);
        rm[d] += rmse(t, p);
        try {
          rr[d] += rrmse(t, p);
          ++rr_counts[d];
        } catch (const Error&) {
          ++w.zero_range_skips;
        }
      }
      ++w.steps;
    }
  }
  w.rmse_x = rm[0] / w.steps;
  w.rmse_y = rm[1] / w.steps;
  w.rmse_z = rm[2] / w.steps;
  w.rrmse_x = rr_counts[0] ? rr[0] / rr_counts[0] : 0.0;
  w.rrmse_y = rr_counts[1] ? rr[1] / rr_counts[1] : 0.0;
  w.rrmse_z = rr_counts[2] ? rr[2] / rr_counts[2] : 0.0;
  return w;
}

struct Candidate {
  int steps_per_row;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  int k = 0;
  double score_sum = 0.0;
  int folds = 0;
};

std::vector<Candidate> build_candidates(Method method, const Grids& grids) {
  std::vector<Candidate> cands;
  std::vector<double> l1 = grids.lambda1;
  std::vector<double> l2 = grids.lambda2;
  std::sort(l1.rbegin(), l1.rend());
  std::sort(l2.rbegin(), l2.rend());
  std::vector<int> ks = grids.neighbor_counts;
  std::sort(ks.begin(), ks.end());
  std::vector<int> batches = grids.batch_sizes;
  std::sort(batches.begin(), batches.end());
  for (const int s : batches) {
    if (method == Method::Ser) {
      for (const double a : l1)
        for (const double b : l2) cands.push_back({s, a, b, 0});
    } else {
      for (const int k : ks) cands.push_back({s, 0.0, 0.0, k});
    }
  }
  return cands;
}

Step make_grf_only_step(const Eigen::RowVectorXd& row, int step_in_row,
                        const Step& like) {
  Eigen::MatrixXd data(Step::kSamples, 3);
  for (int d = 0; d < 3; ++d)
    data.col(d) =
        row.segment(grf_component_offset(step_in_row, d), Step::kSamples)
            .transpose();
  Step step = Step::make({chan::kGrfX, chan::kGrfY, chan::kGrfZ},
                         std::move(data), like.side, like.body_weight_newtons);
  step.athlete_id = like.athlete_id;
  step.collection_id = like.collection_id;
  step.measurement_id = like.measurement_id;
  step.index_in_measurement = like.index_in_measurement;
  step.speed_mps = like.speed_mps;
  return step;
}

}  // namespace

std::string to_string(Method m) { return m == Method::Ser ? "ser" : "knn"; }

Method method_from_string(const std::string& name) {
  if (name == "ser") return Method::Ser;
  if (name == "knn") return Method::Knn;
  if (name == "lstm")
    fail(ErrorCode::UnimplementedMethod,
         "method 'lstm' is not implemented; supported methods: ser, knn");
  fail(ErrorCode::InvalidArgument,
       "unknown method '" + name + "' (supported: ser, knn)");
}

Grids default_grids() {
  Grids g;
  g.batch_sizes = {5, 10};
  g.lambda1 = {0.0, 1e-4};
  g.lambda2 = {0.0, 1e-3};
  g.neighbor_counts = {1, 5, 10};
  return g;
}

Grids full_grids() {
  Grids g;
  g.batch_sizes = {2, 3, 5, 6, 10, 12, 15, 20, 30, 60};
  g.lambda1 = {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  g.lambda2 = g.lambda1;
  g.neighbor_counts = {1, 2, 5, 10, 20, 40};
  return g;
}

HyperChoice select_hyperparams(const StepStore& store, const TaskSpec& task,
                               const Grids& grids, const FoldPlan& folds,
                               std::vector<std::string>* warnings,
                               std::vector<HyperChoice>* ranked) {
  auto warn = [&](const std::string& message) {
    if (warnings) warnings->push_back(message);
  };
  std::vector<Candidate> cands = build_candidates(task.method, grids);
  if (cands.empty()) fail(ErrorCode::InvalidArgument, "empty hyperparameter grid");

  int folds_used = 0;
  int folds_skipped = 0;
  for (const auto& fold_collection : folds.validation_collections) {
    ScenarioSplit split;
    try {
      split = make_scenario_split(store, task.scenario, fold_collection,
                                  {task.test_collection});
    } catch (const Error& e) {
      warn("fold " + fold_collection + " skipped: " + e.what());
      ++folds_skipped;
      continue;
    }
    if (split.train.empty() || split.validation.empty()) {
      warn("fold " + fold_collection + " skipped: empty split");
      ++folds_skipped;
      continue;
    }
    const auto train_ptrs = gather(store, split.train);
    const auto val_ptrs = gather(store, split.validation);

    bool fold_scored = false;
    for (std::size_t c = 0; c < cands.size();) {
      const int S = cands[c].steps_per_row;
      DesignMatrices train, val;
      try {
        train = assemble(train_ptrs, S, task.sensors);
        val = assemble(val_ptrs, S, task.sensors);
      } catch (const Error& e) {
        warn("fold " + fold_collection + ", S=" + std::to_string(S) +
             " skipped: " + e.what());
        while (c < cands.size() && cands[c].steps_per_row == S) ++c;
        continue;
      }

      if (task.method == Method::Ser) {
        const TruncatedSvd imu_svd = truncated_svd(train.imu, clamped_rank(train.imu));
        const TruncatedSvd grf_svd = truncated_svd(train.grf, clamped_rank(train.grf));
        for (; c < cands.size() && cands[c].steps_per_row == S; ++c) {
          SerHyper hyper;
          hyper.steps_per_row = S;
          hyper.imu_rank = RankPolicy::fixed(imu_svd.rank());
          hyper.grf_rank = RankPolicy::fixed(grf_svd.rank());
          hyper.lambda1 = cands[c].lambda1;
          hyper.lambda2 = cands[c].lambda2;
          try {
            const SerModel model = ser_fit_embedded(imu_svd, grf_svd, hyper,
                                                    task.sensors, S,
                                                    train.row_count());
            const Eigen::MatrixXd pred = ser_predict_rows(model, val.imu);
            cands[c].score_sum += mean_step_rmse_z(val.grf, pred, S);
            cands[c].folds += 1;
            fold_scored = true;
          } catch (const ConvergenceError& e) {
            warn("fold " + fold_collection + ", S=" + std::to_string(S) +
                 ", l1=" + std::to_string(cands[c].lambda1) +
                 ", l2=" + std::to_string(cands[c].lambda2) +
                 " skipped: " + e.what());
          }
        }
      } else {
        int k_max = 0;
        for (std::size_t i = c;
             i < cands.size() && cands[i].steps_per_row == S; ++i)
          k_max = std::max(k_max, cands[i].k);
        k_max = static_cast<int>(
            std::min<Eigen::Index>(k_max, train.row_count()));
        KnnModel model = knn_fit(train, k_max);
        std::vector<std::vector<NeighborInfo>> scans(val.row_count());
        for (Eigen::Index q = 0; q < val.row_count(); ++q)
          scans[q] = knn_neighbors(model, val.imu.row(q), k_max);
        for (; c < cands.size() && cands[c].steps_per_row == S; ++c) {
          if (cands[c].k > train.row_count()) {
            warn("fold " + fold_collection + ": k=" + std::to_string(cands[c].k) +
                 " exceeds " + std::to_string(train.row_count()) + " rows");
            continue;
          }
          Eigen::MatrixXd pred(val.row_count(), val.grf.cols());
          for (Eigen::Index q = 0; q < val.row_count(); ++q) {
            std::vector<NeighborInfo> prefix(
                scans[q].begin(), scans[q].begin() + cands[c].k);
            pred.row(q) = knn_combine(model.y, prefix, model.weighting);
          }
          cands[c].score_sum += mean_step_rmse_z(val.grf, pred, S);
          cands[c].folds += 1;
          fold_scored = true;
        }
      }
    }
    if (fold_scored)
      ++folds_used;
    else
      ++folds_skipped;
  }
  if (folds_used == 0)
    fail(ErrorCode::AllFoldsInfeasible,
         "no usable validation fold for task " + task.name());

  // Order by the fold-mean score; the candidate order encodes the tie-break
  // (smaller S first, then stronger regularization / smaller k).
  std::vector<const Candidate*> scored;
  for (const auto& cand : cands)
    if (cand.folds > 0) scored.push_back(&cand);
  if (scored.empty())
    fail(ErrorCode::AllFoldsInfeasible,
         "no hyperparameter candidate scored any fold");
  std::stable_sort(scored.begin(), scored.end(),
                   [](const Candidate* a, const Candidate* b) {
                     return a->score_sum / a->folds < b->score_sum / b->folds;
                   });

  std::vector<HyperChoice> choices;
  choices.reserve(scored.size());
  for (const Candidate* cand : scored) {
    HyperChoice choice;
    choice.steps_per_row = cand->steps_per_row;
    choice.lambda1 = cand->lambda1;
    choice.lambda2 = cand->lambda2;
    choice.k = cand->k;
    choice.validation_rmse_z = cand->score_sum / cand->folds;
    choice.folds_used = folds_used;
    choice.folds_skipped = folds_skipped;
    choices.push_back(choice);
  }
  if (ranked) *ranked = choices;
  return choices.front();
}

EvalReport run_task(const StepStore& store, const TaskSpec& task_in,
                    const Grids& grids, KnnWeighting knn_weighting,
                    NetImpulseMode impulse_mode) {
  try {
    EvalReport report;
    TaskSpec task = task_in;
    const auto collections = store.collections_of(task.target_athlete);
    if (collections.empty())
      fail(ErrorCode::MissingFile,
           "no steps for athlete '" + task.target_athlete + "'");
    if (task.test_collection.empty()) {
      Rng rng = Rng::stream(task.seed, "test-collection",
                            Rng::hash_tag(0, task.target_athlete));
      task.test_collection = collections[rng.uniform_int(collections.size())];
    }
    report.task = task;
    report.test_collection = task.test_collection;

    const FoldPlan folds =
        make_fold_plan(store, task.scenario, task.target_athlete,
                       task.test_collection, task.seed);
    std::vector<HyperChoice> ranked;
    report.chosen =
        select_hyperparams(store, task, grids, folds, &report.warnings, &ranked);

    const ScenarioSplit split =
        make_scenario_split(store, task.scenario, task.test_collection);
    const auto train_ptrs = gather(store, split.train);
    const auto val_ptrs = gather(store, split.validation);

    using clock = std::chrono::steady_clock;
    std::optional<SerModel> ser_model;
    if (task.method == Method::Ser) {
      // Fit candidates best-first; a fold-validated pair can still stall on
      // the larger final split when the loss has no curvature along the
      // intercept direction, in which case the next candidate takes over.
      const auto t0 = clock::now();
      for (std::size_t rank_idx = 0; rank_idx < ranked.size(); ++rank_idx) {
        const HyperChoice& cand = ranked[rank_idx];
        const DesignMatrices train =
            assemble(train_ptrs, cand.steps_per_row, task.sensors);
        SerHyper hyper;
        hyper.steps_per_row = cand.steps_per_row;
        hyper.imu_rank = clamped_rank(train.imu);
        hyper.grf_rank = clamped_rank(train.grf);
        hyper.lambda1 = cand.lambda1;
        hyper.lambda2 = cand.lambda2;
        try {
          ser_model = ser_fit(train, hyper);
          report.chosen = cand;
          report.train_rows = static_cast<int>(train.row_count());
          break;
        } catch (const ConvergenceError& e) {
          if (rank_idx + 1 == ranked.size()) throw;
          report.warnings.push_back(
              "final fit with S=" + std::to_string(cand.steps_per_row) +
              ", l1=" + std::to_string(cand.lambda1) +
              ", l2=" + std::to_string(cand.lambda2) +
              " did not converge; falling back to the next candidate");
        }
      }
      report.fit_seconds =
          std::chrono::duration<double>(clock::now() - t0).count();
      if (ser_model->degenerate_fit)
        report.warnings.push_back("degenerate fit: training rows <= embedding rank");
    }

    const int S = report.chosen.steps_per_row;
    const DesignMatrices val = assemble(val_ptrs, S, task.sensors);
    report.train_steps = static_cast<int>(split.train.size());
    report.eval_steps = static_cast<int>(val.row_count()) * S;
    report.eval_rows = static_cast<int>(val.row_count());

    Eigen::MatrixXd pred(val.row_count(), val.grf.cols());
    std::optional<Eigen::MatrixXd> alt_pred;

    if (task.method == Method::Ser) {
      const auto t1 = clock::now();
      pred = ser_predict_rows(*ser_model, val.imu);
      report.predict_seconds =
          std::chrono::duration<double>(clock::now() - t1).count();
    } else {
      const DesignMatrices train = assemble(train_ptrs, S, task.sensors);
      report.train_rows = static_cast<int>(train.row_count());
      const int k = static_cast<int>(
          std::min<Eigen::Index>(report.chosen.k, train.row_count()));
      const auto t0 = clock::now();
      const KnnModel model = knn_fit(train, k, knn_weighting);
      const auto t1 = clock::now();
      alt_pred.emplace(val.row_count(), val.grf.cols());
      const KnnWeighting alt = knn_weighting == KnnWeighting::InverseDistance
                                   ? KnnWeighting::PaperLiteral
                                   : KnnWeighting::InverseDistance;
      for (Eigen::Index q = 0; q < val.row_count(); ++q) {
        KnnPrediction p = knn_predict(model, val.imu.row(q));
        pred.row(q) = p.y;
        std::vector<NeighborInfo> copy = p.neighbors;
        alt_pred->row(q) = knn_combine(model.y, copy, alt);
        if (q < kProvenanceSamples) {
          ProvenanceSample sample;
          sample.query_row = static_cast<int>(q);
          for (const auto& nb : p.neighbors) {
            NeighborRef ref;
            ref.row = static_cast<int>(nb.row);
            ref.distance = nb.distance;
            ref.weight = nb.weight;
            ref.measurement_id = model.rows[nb.row].measurement_id;
            ref.step_ids = model.rows[nb.row].step_ids;
            sample.neighbors.push_back(std::move(ref));
          }
          report.provenance_samples.push_back(std::move(sample));
        }
      }
      const auto t2 = clock::now();
      report.fit_seconds = std::chrono::duration<double>(t1 - t0).count();
      report.predict_seconds = std::chrono::duration<double>(t2 - t1).count();
    }

    report.waveform = waveform_errors(val.grf, pred, S);
    if (alt_pred)
      report.alt_weighting_waveform = waveform_errors(val.grf, *alt_pred, S);

    // Biomechanical variables on reassembled per-step waveforms.
    std::map<std::string, std::vector<double>> truth_vals, pred_vals;
    for (const auto& name : biomech_variable_names()) {
      truth_vals[name] = {};
      pred_vals[name] = {};
    }
    std::vector<double> truth_alt, pred_alt;
    for (Eigen::Index r = 0; r < val.row_count(); ++r) {
      for (int s = 0; s < S; ++s) {
        const Step& like = *val_ptrs[val.rows[r].span_positions[s]];
        const Step measured = make_grf_only_step(val.grf.row(r), s, like);
        const Step predicted = make_grf_only_step(pred.row(r), s, like);
        BiomechReport rt, rp;
        try {
          rt = compute_all(measured, like.body_weight_newtons, impulse_mode);
          rp = compute_all(predicted, like.body_weight_newtons, impulse_mode);
        } catch (const Error&) {
          ++report.biomech_failed_steps;
          continue;
        }
        for (const auto& name : biomech_variable_names()) {
          truth_vals[name].push_back(biomech_variable(rt, name));
          pred_vals[name].push_back(biomech_variable(rp, name));
        }
        // The other impulse convention differs by contact time and the
        // body-weight unit; derive it from the same events.
        const double sign =
            impulse_mode == NetImpulseMode::LiteralMinusOne ? 1.0 : -1.0;
        truth_alt.push_back(rt.net_vertical_impulse_bw_s +
                            sign * (1.0 - rt.contact_time_s));
        pred_alt.push_back(rp.net_vertical_impulse_bw_s +
                           sign * (1.0 - rp.contact_time_s));

        if (static_cast<int>(report.overlays.size()) < kOverlaySteps) {
          OverlaySeries overlay;
          overlay.step_id = like.step_id();
          overlay.measured_gz = measured.channel(chan::kGrfZ);
          overlay.predicted_gz = predicted.channel(chan::kGrfZ);
          report.overlays.push_back(std::move(overlay));
        }
      }
    }
    for (const auto& name : biomech_variable_names()) {
      try {
        report.biomech_mape[name] = mape(truth_vals[name], pred_vals[name]);
      } catch (const Error& e) {
        report.biomech_mape[name] = MapeResult{
            0.0, 0, static_cast<int>(truth_vals[name].size())};
        report.warnings.push_back(name + ": " + e.what());
      }
    }
    try {
      report.net_impulse_alt = mape(truth_alt, pred_alt);
    } catch (const Error& e) {
      report.net_impulse_alt =
          MapeResult{0.0, 0, static_cast<int>(truth_alt.size())};
      report.warnings.push_back(std::string("net_impulse_alt: ") + e.what());
    }
    return report;
  } catch (const Error& e) {
    throw Error(e.code(), "task " + task_in.name() + ": " + e.what());
  }
}

nlohmann::ordered_json report_to_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  j["format_version"] = kReportFormatVersion;
  j["task"] = {{"scenario", to_string(report.task.scenario)},
               {"sensors", to_string(report.task.sensors)},
               {"method", to_string(report.task.method)},
               {"target_athlete", report.task.target_athlete},
               {"test_collection", report.test_collection},
               {"seed", report.task.seed}};
  j["chosen"] = {{"steps_per_row", report.chosen.steps_per_row},
                 {"lambda1", report.chosen.lambda1},
                 {"lambda2", report.chosen.lambda2},
                 {"k", report.chosen.k},
                 {"validation_rmse_z", report.chosen.validation_rmse_z},
                 {"folds_used", report.chosen.folds_used},
                 {"folds_skipped", report.chosen.folds_skipped}};
  j["counts"] = {{"train_steps", report.train_steps},
                 {"eval_steps", report.eval_steps},
                 {"train_rows", report.train_rows},
                 {"eval_rows", report.eval_rows},
                 {"biomech_failed_steps", report.biomech_failed_steps}};
  auto waveform = [](const WaveformErrors& w) {
    return nlohmann::ordered_json{
        {"rmse", {{"x", w.rmse_x}, {"y", w.rmse_y}, {"z", w.rmse_z}}},
        {"rrmse", {{"x", w.rrmse_x}, {"y", w.rrmse_y}, {"z", w.rrmse_z}}},
        {"steps", w.steps},
        {"zero_range_skips", w.zero_range_skips}};
  };
  j["waveform"] = waveform(report.waveform);
  if (report.alt_weighting_waveform)
    j["alt_weighting_waveform"] = waveform(*report.alt_weighting_waveform);
  nlohmann::ordered_json mape_json;
  for (const auto& name : biomech_variable_names()) {
    const auto it = report.biomech_mape.find(name);
    if (it == report.biomech_mape.end()) continue;
    mape_json[name] = {{"mape", it->second.value},
                       {"steps_used", it->second.used},
                       {"steps_skipped", it->second.skipped}};
  }
  j["biomech_mape"] = std::move(mape_json);
  j["net_impulse_alt"] = {{"mape", report.net_impulse_alt.value},
                          {"steps_used", report.net_impulse_alt.used},
                          {"steps_skipped", report.net_impulse_alt.skipped}};
  if (!report.provenance_samples.empty()) {
    nlohmann::ordered_json samples = nlohmann::ordered_json::array();
    for (const auto& sample : report.provenance_samples) {
      nlohmann::ordered_json neighbors = nlohmann::ordered_json::array();
      for (const auto& nb : sample.neighbors)
        neighbors.push_back({{"row", nb.row},
                             {"distance", nb.distance},
                             {"weight", nb.weight},
                             {"measurement_id", nb.measurement_id},
                             {"step_ids", nb.step_ids}});
      samples.push_back({{"query_row", sample.query_row},
                         {"neighbors", std::move(neighbors)}});
    }
    j["provenance_samples"] = std::move(samples);
  }
  j["warnings"] = report.warnings;
  return j;
}

void report_tables(const std::vector<EvalReport>& reports,
                   const std::filesystem::path& out_dir,
                   const nlohmann::ordered_json* config_echo) {
  if (reports.empty())
    fail(ErrorCode::InvalidArgument, "cannot tabulate zero reports");
  std::filesystem::create_directories(out_dir);
  const std::string csv_header =
      config_echo ? "# run_config: " + config_echo->dump() + "\n" : "";

  struct Cell {
    double rmse_z_sum = 0.0, rrmse_z_sum = 0.0;
    int count = 0;
  };
  std::map<std::pair<int, std::pair<int, int>>, Cell> cells;
  for (const auto& r : reports) {
    auto& cell = cells[{static_cast<int>(r.task.sensors),
                        {static_cast<int>(r.task.scenario),
                         static_cast<int>(r.task.method)}}];
    cell.rmse_z_sum += r.waveform.rmse_z;
    cell.rrmse_z_sum += r.waveform.rrmse_z;
    cell.count += 1;
  }

  const std::array<Scenario, 3> scenario_order = {
      Scenario::Others, Scenario::Everyone, Scenario::Personal};
  auto column_names = [&]() {
    std::vector<std::string> names;
    for (const Scenario sc : scenario_order)
      for (const Method m : kAllMethods)
        names.push_back(to_string(sc) + "_" + to_string(m));
    return names;
  }();

  auto format_cell = [](double v) {
    char buf[32];
    const int len = std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf, len);
  };

  auto write_matrix = [&](const std::string& file, auto value_of) {
    std::ofstream out(out_dir / file);
    if (!out) fail(ErrorCode::MissingFile, "cannot write " + (out_dir / file).string());
    out << csv_header << "sensors";
    for (const auto& c : column_names) out << ',' << c;
    out << '\n';
    for (const SensorSet s : kAllSensorSets) {
      out << to_string(s);
      for (const Scenario sc : scenario_order) {
        for (const Method m : kAllMethods) {
          const auto it = cells.find({static_cast<int>(s),
                                      {static_cast<int>(sc), static_cast<int>(m)}});
          out << ',';
          if (it != cells.end() && it->second.count > 0)
            out << format_cell(value_of(it->second));
        }
      }
      out << '\n';
    }
  };
  write_matrix("rmse_z.csv",
               [](const Cell& c) { return c.rmse_z_sum / c.count; });
  write_matrix("rrmse_z.csv",
               [](const Cell& c) { return c.rrmse_z_sum / c.count; });

  // Biomechanical MAPE table for the ALL input signals, paper-style.
  {
    std::map<std::pair<std::string, std::pair<int, int>>, std::pair<double, int>>
        mape_cells;
    for (const auto& r : reports) {
      if (r.task.sensors != SensorSet::All) continue;
      for (const auto& [name, result] : r.biomech_mape) {
        if (result.used == 0) continue;
        auto& cell = mape_cells[{name,
                                 {static_cast<int>(r.task.scenario),
                                  static_cast<int>(r.task.method)}}];
        cell.first += result.value;
        cell.second += 1;
      }
    }
    std::ofstream out(out_dir / "mape_all.csv");
    if (!out)
      fail(ErrorCode::MissingFile, "cannot write " + (out_dir / "mape_all.csv").string());
    out << csv_header << "variable";
    for (const auto& c : column_names) out << ',' << c;
    out << '\n';
    for (const auto& name : biomech_variable_names()) {
      out << name;
      for (const Scenario sc : scenario_order) {
        for (const Method m : kAllMethods) {
          const auto it = mape_cells.find(
              {name, {static_cast<int>(sc), static_cast<int>(m)}});
          out << ',';
          if (it != mape_cells.end() && it->second.second > 0)
            out << format_cell(it->second.first / it->second.second);
        }
      }
      out << '\n';
    }
  }

  // Machine-readable mirror of the matrices.
  {
    nlohmann::ordered_json j;
    j["format_version"] = kReportFormatVersion;
    if (config_echo) j["run_config"] = *config_echo;
    j["columns"] = column_names;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const SensorSet s : kAllSensorSets) {
      nlohmann::ordered_json row;
      row["sensors"] = to_string(s);
      nlohmann::ordered_json rmse_cells = nlohmann::ordered_json::array();
      nlohmann::ordered_json rrmse_cells = nlohmann::ordered_json::array();
      for (const Scenario sc : scenario_order) {
        for (const Method m : kAllMethods) {
          const auto it = cells.find({static_cast<int>(s),
                                      {static_cast<int>(sc), static_cast<int>(m)}});
          if (it != cells.end() && it->second.count > 0) {
            rmse_cells.push_back(it->second.rmse_z_sum / it->second.count);
            rrmse_cells.push_back(it->second.rrmse_z_sum / it->second.count);
          } else {
            rmse_cells.push_back(nullptr);
            rrmse_cells.push_back(nullptr);
          }
        }
      }
      row["rmse_z"] = std::move(rmse_cells);
      row["rrmse_z"] = std::move(rrmse_cells);
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    std::ofstream out(out_dir / "tables.json");
    if (!out)
      fail(ErrorCode::MissingFile, "cannot write " + (out_dir / "tables.json").string());
    out << j.dump(2) << "\n";
  }

  // Plot-ready overlay series, one file per task.
  for (const auto& r : reports) {
    if (r.overlays.empty()) continue;
    const std::string file = "overlay_" + r.task.name() + ".csv";
    std::ofstream out(out_dir / file);
    if (!out) fail(ErrorCode::MissingFile, "cannot write " + (out_dir / file).string());
    out << csv_header << "step_id,sample,measured_gz,predicted_gz\n";
    for (const auto& overlay : r.overlays) {
      for (Eigen::Index i = 0; i < overlay.measured_gz.size(); ++i) {
        char buf[96];
        const int len = std::snprintf(buf, sizeof(buf), "%s,%ld,%.9g,%.9g\n",
                                      overlay.step_id.c_str(),
                                      static_cast<long>(i),
                                      overlay.measured_gz[i],
                                      overlay.predicted_gz[i]);
        out.write(buf, len);
      }
    }
  }
}

}  // namespace grf
