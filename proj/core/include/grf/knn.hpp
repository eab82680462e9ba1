#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "grf/ser.hpp"

namespace grf {

/// Neighbor weighting. The paper's printed formula weights neighbors by
/// their distance, which favors far neighbors and is degenerate at d = 0;
/// inverse-distance is the default, the literal form ships for comparison.
enum class KnnWeighting { InverseDistance, PaperLiteral };

std::string to_string(KnnWeighting w);
KnnWeighting knn_weighting_from_string(const std::string& name);

struct KnnModel {
  Eigen::MatrixXd x;  // n x m training feature rows, stored verbatim
  Eigen::MatrixXd y;  // n x p training GRF rows
  int k = 1;
  KnnWeighting weighting = KnnWeighting::InverseDistance;
  int steps_per_row = 1;
  SensorSet sensors = SensorSet::All;
  std::vector<DesignMatrices::RowProvenance> rows;
};

KnnModel knn_fit(const DesignMatrices& train, int k,
                 KnnWeighting weighting = KnnWeighting::InverseDistance);

struct NeighborInfo {
  Eigen::Index row = 0;
  double distance = 0.0;
  double weight = 0.0;
};

struct KnnPrediction {
  Eigen::RowVectorXd y;
  std::vector<NeighborInfo> neighbors;  // ascending distance, the provenance
};

/// Weighted average of the k nearest training targets by Euclidean
/// distance. Distance ties break toward the lower training index; an exact
/// feature match (distance <= 1e-12) returns that row's target verbatim.
KnnPrediction knn_predict(const KnnModel& model, const Eigen::RowVectorXd& x);

/// Sorted neighbor list of the k nearest rows, weights unset.
std::vector<NeighborInfo> knn_neighbors(const KnnModel& model,
                                        const Eigen::RowVectorXd& x, int k);

/// Fills weights and combines stored targets for an already-sorted neighbor
/// list. Grid searches reuse one scan for several k by passing prefixes.
Eigen::RowVectorXd knn_combine(const Eigen::MatrixXd& targets,
                               std::vector<NeighborInfo>& neighbors,
                               KnnWeighting weighting);

void save_knn_model(const KnnModel& model, const std::filesystem::path& path);
KnnModel load_knn_model(const std::filesystem::path& path);

}  // namespace grf
