#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "grf/signal.hpp"

namespace grf {

/// Affine clock correction mapping IMU time onto the GRF clock:
/// t_grf = scale * t_imu + offset. Accepted drifts are small; scale must
/// stay within [0.99, 1.01].
struct LinearWarp {
  double scale = 1.0;
  double offset = 0.0;

  double imu_to_grf(double t_imu) const { return scale * t_imu + offset; }
  double grf_to_imu(double t_grf) const { return (t_grf - offset) / scale; }
};

struct StepBoundary {
  Eigen::Index start = 0;  // sample index of the detected foot strike
  Side side = Side::Left;
};
using StepBoundaries = std::vector<StepBoundary>;

/// Time of the sharpest landing edge inside [window_begin, window_end]:
/// the sample at which the largest forward difference of the signal
/// completes. Throws no-reference-found when the window is empty or the
/// edge does not stand out from the surrounding trace.
double detect_jump_reference(const SampledSignal& norm_signal,
                             double window_begin_s, double window_end_s);

/// Two-point affine fit through (t_imu, t_grf) anchor pairs.
LinearWarp estimate_linear_warp(std::pair<double, double> ref_start,
                                std::pair<double, double> ref_end);

/// Resamples onto the GRF clock by linear interpolation. The output keeps
/// the input grid (rate, start time, length); samples inverse-mapped beyond
/// the input span hold the boundary value. Throws empty-overlap when the
/// whole grid maps outside the input.
SampledSignal apply_warp(const SampledSignal& signal, const LinearWarp& warp);

/// 200-sample stride reference: a 100 ms triangle (50-sample rise, 50-sample
/// fall) followed by 100 ms of zeros, unit peak.
Eigen::VectorXd step_template();

/// Splits a measurement into steps by the maxima of the correlation between
/// shank acceleration norm and the stride reference. The input carries one
/// channel (combined shanks) or two (left then right); with two channels
/// detection runs on their sum and each boundary's side anchors to the
/// shank with the larger local peak, alternating afterwards.
StepBoundaries segment_steps(const SampledSignal& shank_accel_norm);

struct AlignedSteps {
  std::vector<Step> steps;
  std::vector<int> shifts;  // per-step circular shift, global delay included
  int global_delay = 0;
};

/// Aligns steps to a common phase: each step is circularly shifted within
/// +/-20 samples to maximize correlation with the running mean of the
/// already-aligned steps, then one common delay maximizes the mean
/// correlation with the stride reference. Shifts apply to all channels;
/// sample values are never changed. `driver` names the channel the
/// correlations are computed on.
AlignedSteps align_steps(std::vector<Step> steps,
                         const std::string& driver = chan::kAccShankNorm);

}  // namespace grf
