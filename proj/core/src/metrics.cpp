#include "grf/metrics.hpp"

#include <cmath>

namespace grf {

double rmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  if (truth.size() != predicted.size())
    fail(ErrorCode::DimensionMismatch, "waveform lengths differ");
  if (truth.size() < 1)
    fail(ErrorCode::InvalidArgument, "waveforms must hold at least one sample");
  return std::sqrt((truth - predicted).squaredNorm() /
                   static_cast<double>(truth.size()));
}

double rrmse(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
  const double err = rmse(truth, predicted);
  const double range_truth = truth.maxCoeff() - truth.minCoeff();
  const double range_pred = predicted.maxCoeff() - predicted.minCoeff();
  const double mean_range = (range_truth + range_pred) / 2.0;
  if (mean_range <= 1e-12)
    fail(ErrorCode::ZeroRange,
         "both signals are constant; rRMSE is undefined");
  return err / mean_range;
}

MapeResult mape(const std::vector<double>& truth,
                const std::vector<double>& predicted) {
  if (truth.size() != predicted.size())
    fail(ErrorCode::DimensionMismatch, "value lists differ in length");
  MapeResult result;
  double acc = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (std::abs(truth[i]) <= 1e-9) {
      ++result.skipped;
      continue;
    }
    acc += std::abs(predicted[i] - truth[i]) / std::abs(truth[i]);
    ++result.used;
  }
  if (result.used == 0)
    fail(ErrorCode::UndefinedMape,
         "every reference value is near zero; MAPE is undefined");
  result.value = acc / result.used;
  return result;
}

}  // namespace grf
