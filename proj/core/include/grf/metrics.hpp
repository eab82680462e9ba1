#pragma once

#include <Eigen/Dense>
#include <vector>

#include "grf/errors.hpp"

namespace grf {

/// Waveform accuracy references from prior work: predictions are considered
/// very accurate below these vertical-GRF thresholds.
inline constexpr double kVeryAccurateRmseZ = 0.21;   // BW
inline constexpr double kVeryAccurateRrmseZ = 0.14;  // fraction

/// Root mean squared error between two equal-length waveforms.
double rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

/// RMSE divided by the mean of the two signal ranges. Throws zero-range
/// when both signals are constant.
double rrmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

struct MapeResult {
  double value = 0.0;  // mean of |pred - truth| / |truth| over used entries
  int used = 0;
  int skipped = 0;  // entries with |truth| below the denominator floor
};

/// Mean absolute percentage error; entries with |truth| <= 1e-9 are skipped
/// and counted. Throws undefined-mape when nothing remains.
MapeResult mape(const std::vector<double>& truth,
                const std::vector<double>& predicted);

}  // namespace grf
