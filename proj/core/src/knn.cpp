#include "grf/knn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

namespace grf {

namespace {
constexpr int kKnnModelFormatVersion = 1;
constexpr double kExactMatchDistance = 1e-12;
}  // namespace

std::string to_string(KnnWeighting w) {
  return w == KnnWeighting::InverseDistance ? "inverse-distance" : "paper-literal";
}

KnnWeighting knn_weighting_from_string(const std::string& name) {
  if (name == "inverse-distance") return KnnWeighting::InverseDistance;
  if (name == "paper-literal") return KnnWeighting::PaperLiteral;
  fail(ErrorCode::InvalidArgument,
       "unknown weighting '" + name + "' (expected inverse-distance|paper-literal)");
}

KnnModel knn_fit(const DesignMatrices& train, int k, KnnWeighting weighting) {
  if (k < 1 || k > train.row_count())
    fail(ErrorCode::InvalidK,
         "k = " + std::to_string(k) + " outside [1, " +
             std::to_string(train.row_count()) + "]");
  KnnModel model;
  model.x = train.imu;
  model.y = train.grf;
  model.k = k;
  model.weighting = weighting;
  model.steps_per_row = train.steps_per_row;
  model.sensors = train.sensors;
  model.rows = train.rows;
  return model;
}

std::vector<NeighborInfo> knn_neighbors(const KnnModel& model,
                                        const Eigen::RowVectorXd& x, int k) {
  if (x.size() != model.x.cols())
    fail(ErrorCode::DimensionMismatch,
         "query has " + std::to_string(x.size()) + " values, model stores " +
             std::to_string(model.x.cols()));
  const Eigen::Index n = model.x.rows();
  if (k < 1 || k > n)
    fail(ErrorCode::InvalidK, "k = " + std::to_string(k) + " outside [1, " +
                                  std::to_string(n) + "]");
  Eigen::VectorXd distances(n);
  for (Eigen::Index i = 0; i < n; ++i)
    distances[i] = (model.x.row(i) - x).norm();

  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + k, order.end(),
                    [&](Eigen::Index a, Eigen::Index b) {
                      if (distances[a] != distances[b])
                        return distances[a] < distances[b];
                      return a < b;
                    });

  std::vector<NeighborInfo> neighbors;
  neighbors.reserve(k);
  for (int j = 0; j < k; ++j)
    neighbors.push_back({order[j], distances[order[j]], 0.0});
  return neighbors;
}

Eigen::RowVectorXd knn_combine(const Eigen::MatrixXd& targets,
                               std::vector<NeighborInfo>& neighbors,
                               KnnWeighting weighting) {
  if (neighbors.empty())
    fail(ErrorCode::InvalidK, "neighbor list is empty");
  // Exact match short-circuits to the stored target (both weightings are
  // undefined or degenerate at zero distance).
  if (neighbors.front().distance <= kExactMatchDistance) {
    for (auto& nb : neighbors) nb.weight = 0.0;
    neighbors.front().weight = 1.0;
    return targets.row(neighbors.front().row);
  }
  double total = 0.0;
  for (auto& nb : neighbors) {
    nb.weight = weighting == KnnWeighting::InverseDistance ? 1.0 / nb.distance
                                                           : nb.distance;
    total += nb.weight;
  }
  Eigen::RowVectorXd y = Eigen::RowVectorXd::Zero(targets.cols());
  for (auto& nb : neighbors) {
    nb.weight /= total;
    y += nb.weight * targets.row(nb.row);
  }
  return y;
}

KnnPrediction knn_predict(const KnnModel& model, const Eigen::RowVectorXd& x) {
  KnnPrediction pred;
  pred.neighbors = knn_neighbors(model, x, model.k);
  pred.y = knn_combine(model.y, pred.neighbors, model.weighting);
  return pred;
}

void save_knn_model(const KnnModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format_version"] = kKnnModelFormatVersion;
  j["model"] = "knn";
  j["k"] = model.k;
  j["weighting"] = to_string(model.weighting);
  j["steps_per_row"] = model.steps_per_row;
  j["sensors"] = to_string(model.sensors);
  auto matrix = [](const Eigen::MatrixXd& m) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  j["x"] = matrix(model.x);
  j["y"] = matrix(model.y);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& r : model.rows)
    rows.push_back({{"measurement_id", r.measurement_id}, {"step_ids", r.step_ids}});
  j["rows"] = std::move(rows);
  std::ofstream out(path);
  if (!out) fail(ErrorCode::MissingFile, "cannot write " + path.string());
  out << j.dump(1) << "\n";
}

KnnModel load_knn_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingFile, "cannot read " + path.string());
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
  if (j.value("format_version", -1) != kKnnModelFormatVersion ||
      j.value("model", "") != "knn")
    fail(ErrorCode::SchemaViolation, "not a KNN model file: " + path.string());
  KnnModel model;
  model.k = j.at("k").get<int>();
  model.weighting = knn_weighting_from_string(j.at("weighting").get<std::string>());
  model.steps_per_row = j.at("steps_per_row").get<int>();
  model.sensors = sensor_set_from_string(j.at("sensors").get<std::string>());
  auto matrix = [](const nlohmann::ordered_json& rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    if (n == 0) return Eigen::MatrixXd{};
    const auto m = static_cast<Eigen::Index>(rows.at(0).size());
    Eigen::MatrixXd out(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < m; ++c)
        out(i, c) = rows.at(i).at(c).get<double>();
    return out;
  };
  model.x = matrix(j.at("x"));
  model.y = matrix(j.at("y"));
  for (const auto& r : j.at("rows")) {
    DesignMatrices::RowProvenance prov;
    prov.measurement_id = r.at("measurement_id").get<std::string>();
    for (const auto& id : r.at("step_ids")) prov.step_ids.push_back(id.get<std::string>());
    model.rows.push_back(std::move(prov));
  }
  return model;
}

}  // namespace grf
