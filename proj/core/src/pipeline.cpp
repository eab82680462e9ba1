#include "grf/pipeline.hpp"

#include <cmath>

#include "grf/filter.hpp"

namespace grf {

namespace {

// Samples kept before the detected strike when cutting the 400 ms window;
// phase alignment moves the strike to the window start afterwards.
constexpr Eigen::Index kPreStrikeSamples = 25;

Eigen::Index index_at(const SampledSignal& s, double t) {
  return static_cast<Eigen::Index>(
      std::llround((t - s.start_time()) * s.rate()));
}

}  // namespace

std::vector<Step> preprocess_measurement(const DatasetIndex& index,
                                         const CollectionInfo& collection,
                                         const MeasurementInfo& measurement) {
  const AthleteInfo& athlete = index.athlete(collection.athlete_id);
  MeasurementData data = load_measurement(index, measurement);

  // Clock alignment: jump references on both streams, two-point warp.
  const SampledSignal imu_jump_norm = l2_norm_channels(
      data.imu, {"acc_sacrum_x", "acc_sacrum_y", "acc_sacrum_z"}, "jump");
  const SampledSignal grf_z = data.grf.extract_channel(chan::kGrfZ);
  const auto& w = measurement.jump_windows;
  const double imu_t1 = detect_jump_reference(imu_jump_norm, w[0][0], w[0][1]);
  const double imu_t2 = detect_jump_reference(imu_jump_norm, w[1][0], w[1][1]);
  const double grf_t1 = detect_jump_reference(grf_z, w[0][0], w[0][1]);
  const double grf_t2 = detect_jump_reference(grf_z, w[1][0], w[1][1]);
  const LinearWarp warp = estimate_linear_warp({imu_t1, grf_t1}, {imu_t2, grf_t2});
  const SampledSignal imu_aligned = apply_warp(data.imu, warp);

  // Noise reduction and unit normalization.
  const SampledSignal imu = butterworth_lowpass(imu_aligned, 20.0, 4);
  const SampledSignal grf_filtered = butterworth_lowpass(data.grf, 30.0, 4);
  const SampledSignal grf = normalize_by_bodyweight(
      downsample(grf_filtered, 2), athlete.body_weight_newtons);

  const SampledSignal acc_sacrum_norm = l2_norm_channels(
      imu, {"acc_sacrum_x", "acc_sacrum_y", "acc_sacrum_z"}, chan::kAccSacrumNorm);
  const SampledSignal acc_shank_l = l2_norm_channels(
      imu, {"acc_shank_left_x", "acc_shank_left_y", "acc_shank_left_z"}, "left");
  const SampledSignal acc_shank_r = l2_norm_channels(
      imu, {"acc_shank_right_x", "acc_shank_right_y", "acc_shank_right_z"},
      "right");
  const SampledSignal gyro_sacrum_norm = l2_norm_channels(
      imu, {"gyro_sacrum_x", "gyro_sacrum_y", "gyro_sacrum_z"},
      chan::kGyroSacrumNorm);
  const SampledSignal gyro_shank_l = l2_norm_channels(
      imu, {"gyro_shank_left_x", "gyro_shank_left_y", "gyro_shank_left_z"},
      "left");
  const SampledSignal gyro_shank_r = l2_norm_channels(
      imu, {"gyro_shank_right_x", "gyro_shank_right_y", "gyro_shank_right_z"},
      "right");

  // Segment only between the jump references.
  const double region_begin = w[0][1] + 0.4;
  const double region_end = w[1][0] - 0.4;
  const Eigen::Index seg_lo =
      std::max<Eigen::Index>(index_at(acc_shank_l, region_begin), 0);
  const Eigen::Index seg_hi = std::min<Eigen::Index>(
      index_at(acc_shank_l, region_end), acc_shank_l.sample_count());
  if (seg_hi - seg_lo < Step::kSamples)
    fail(ErrorCode::NoStepsFound,
         measurement.id + ": run region between jump references is too short");
  Eigen::MatrixXd shank_pair(seg_hi - seg_lo, 2);
  shank_pair.col(0) = acc_shank_l.data().col(0).segment(seg_lo, seg_hi - seg_lo);
  shank_pair.col(1) = acc_shank_r.data().col(0).segment(seg_lo, seg_hi - seg_lo);
  const StepBoundaries boundaries = segment_steps(SampledSignal(
      Step::kRateHz, {"left", "right"}, std::move(shank_pair),
      acc_shank_l.time_at(seg_lo)));

  // Cut 200-sample windows across all channels of the common 500 Hz frame.
  const auto& layout = step_channel_layout();
  std::vector<Step> steps;
  steps.reserve(boundaries.size());
  const Eigen::Index n = grf.sample_count();
  for (const StepBoundary& b : boundaries) {
    const Eigen::Index start = b.start + seg_lo - kPreStrikeSamples;
    if (start < 0 || start + Step::kSamples > n ||
        start + Step::kSamples > imu.sample_count())
      continue;  // window clipped by the measurement edge
    Eigen::MatrixXd window(Step::kSamples, layout.size());
    window.col(0) = imu.channel("acc_sacrum_x").segment(start, Step::kSamples);
    window.col(1) = imu.channel("acc_sacrum_y").segment(start, Step::kSamples);
    window.col(2) = imu.channel("acc_sacrum_z").segment(start, Step::kSamples);
    window.col(3) =
        acc_sacrum_norm.data().col(0).segment(start, Step::kSamples);
    window.col(4) = (b.side == Side::Left ? acc_shank_l : acc_shank_r)
                        .data()
                        .col(0)
                        .segment(start, Step::kSamples);
    window.col(5) =
        gyro_sacrum_norm.data().col(0).segment(start, Step::kSamples);
    window.col(6) = (b.side == Side::Left ? gyro_shank_l : gyro_shank_r)
                        .data()
                        .col(0)
                        .segment(start, Step::kSamples);
    window.col(7) = grf.channel(chan::kGrfX).segment(start, Step::kSamples);
    window.col(8) = grf.channel(chan::kGrfY).segment(start, Step::kSamples);
    window.col(9) = grf.channel(chan::kGrfZ).segment(start, Step::kSamples);

    Step step = Step::make(layout, std::move(window), b.side,
                           athlete.body_weight_newtons);
    step.athlete_id = athlete.id;
    step.collection_id = collection.id;
    step.measurement_id = measurement.id;
    step.index_in_measurement = static_cast<int>(steps.size());
    step.speed_mps = measurement.speed_mps;
    steps.push_back(std::move(step));
  }
  if (steps.empty())
    fail(ErrorCode::NoStepsFound, measurement.id + ": no extractable steps");

  AlignedSteps aligned = align_steps(std::move(steps));
  return std::move(aligned.steps);
}

PreprocessOutcome preprocess_dataset(const DatasetIndex& index) {
  PreprocessOutcome outcome;
  for (const auto& collection : index.collections) {
    for (const auto& measurement : collection.measurements) {
      try {
        auto steps = preprocess_measurement(index, collection, measurement);
        for (auto& s : steps) outcome.store.steps.push_back(std::move(s));
      } catch (const Error& e) {
        outcome.warnings.push_back(measurement.id + " skipped: " + e.what());
      }
    }
  }
  return outcome;
}

}  // namespace grf
