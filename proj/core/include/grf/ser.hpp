#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "grf/signal.hpp"
#include "grf/svd.hpp"

namespace grf {

/// Row-per-batch design matrices: each row holds S consecutive steps of one
/// measurement. IMU columns follow the sensor-set feature layout per step,
/// step-major; GRF columns hold the g_x, g_y, g_z blocks of each step in
/// that order.
struct DesignMatrices {
  Eigen::MatrixXd imu;  // n x (S * 200 * channels)
  Eigen::MatrixXd grf;  // n x (S * 600)
  int steps_per_row = 1;
  SensorSet sensors = SensorSet::All;

  struct RowProvenance {
    std::string measurement_id;
    std::vector<std::string> step_ids;  // S entries, in row order
    // Positions of the batched steps in the span passed to
    // assemble_matrices; in-process bookkeeping, never serialized.
    std::vector<std::size_t> span_positions;
  };
  std::vector<RowProvenance> rows;

  Eigen::Index row_count() const { return imu.rows(); }
};

/// Groups consecutive non-overlapping runs of S steps per measurement into
/// rows; measurements contribute floor(count / S) rows and remainder steps
/// are dropped. Steps must be ordered in time within each measurement.
/// Throws empty-design when no measurement reaches S steps.
DesignMatrices assemble_matrices(std::span<const Step* const> steps,
                                 int steps_per_row, SensorSet sensors);

struct SerHyper {
  int steps_per_row = 5;
  RankPolicy imu_rank = RankPolicy::fixed(6);
  RankPolicy grf_rank = RankPolicy::fixed(6);
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool penalize_intercept = true;
};

/// Fitted SVD embedding regression: truncated factorizations of both design
/// matrices plus one elastic-net regression per GRF embedding component.
struct SerModel {
  TruncatedSvd imu_svd;
  TruncatedSvd grf_svd;
  Eigen::MatrixXd coefficients;  // r_grf x r_imu, row j = beta_j
  Eigen::VectorXd intercepts;    // r_grf
  SerHyper hyper;
  SensorSet sensors = SensorSet::All;
  int steps_per_row = 1;
  /// Set when the regression is underdetermined (rows <= embedding width);
  /// the fit interpolates but does not generalize.
  bool degenerate_fit = false;

  int imu_rank() const { return imu_svd.rank(); }
  int grf_rank() const { return grf_svd.rank(); }
};

SerModel ser_fit(const DesignMatrices& train, const SerHyper& hyper);

/// Fits the per-component regressions on precomputed factorizations; lets
/// hyperparameter searches reuse one SVD pair across regularization grids.
SerModel ser_fit_embedded(TruncatedSvd imu_svd, TruncatedSvd grf_svd,
                          const SerHyper& hyper, SensorSet sensors,
                          int steps_per_row, Eigen::Index n_rows);

/// Embed, regress, reconstruct: x~ = x V Sigma^-1, y~_j = x~ beta_j +
/// alpha_j, y = y~ Sigma V^T. Throws ill-conditioned-embedding when a
/// retained IMU singular value is at numerical zero.
Eigen::RowVectorXd ser_predict(const SerModel& model,
                               const Eigen::RowVectorXd& x);

/// Row-wise prediction of a whole design matrix.
Eigen::MatrixXd ser_predict_rows(const SerModel& model,
                                 const Eigen::MatrixXd& x_rows);

void save_ser_model(const SerModel& model, const std::filesystem::path& path);
SerModel load_ser_model(const std::filesystem::path& path);

}  // namespace grf
