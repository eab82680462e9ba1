#include "grf/ser.hpp"

#include <fstream>

#include <json.hpp>

#include "grf/elastic_net.hpp"

namespace grf {

namespace {

constexpr int kSerModelFormatVersion = 1;

nlohmann::ordered_json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const nlohmann::ordered_json& j) {
  const auto n = static_cast<Eigen::Index>(j.size());
  if (n == 0) return {};
  const auto m = static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd out(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index c = 0; c < m; ++c)
      out(i, c) = j.at(i).at(c).get<double>();
  return out;
}

nlohmann::ordered_json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vector_from_json(const nlohmann::ordered_json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

nlohmann::ordered_json rank_policy_to_json(const RankPolicy& p) {
  nlohmann::ordered_json j;
  j["kind"] = p.kind == RankPolicy::Kind::Fixed ? "fixed" : "energy";
  j["rank"] = p.rank;
  j["energy_threshold"] = p.energy_threshold;
  return j;
}

RankPolicy rank_policy_from_json(const nlohmann::ordered_json& j) {
  RankPolicy p;
  p.kind = j.at("kind").get<std::string>() == "fixed" ? RankPolicy::Kind::Fixed
                                                      : RankPolicy::Kind::Energy;
  p.rank = j.at("rank").get<int>();
  p.energy_threshold = j.at("energy_threshold").get<double>();
  return p;
}

}  // namespace

DesignMatrices assemble_matrices(std::span<const Step* const> steps,
                                 int steps_per_row, SensorSet sensors) {
  if (steps_per_row < 1)
    fail(ErrorCode::InvalidArgument, "steps per row must be >= 1");

  const Eigen::Index m_step = sensor_values_per_step(sensors);
  const Eigen::Index p_step = 3 * Step::kSamples;

  // Count full batches measurement by measurement.
  std::vector<std::pair<std::size_t, std::size_t>> runs;  // [begin, end)
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= steps.size(); ++i) {
    if (i == steps.size() ||
        steps[i]->measurement_id != steps[begin]->measurement_id) {
      runs.emplace_back(begin, i);
      begin = i;
    }
  }
  Eigen::Index n_rows = 0;
  for (const auto& [b, e] : runs)
    n_rows += static_cast<Eigen::Index>((e - b) / steps_per_row);
  if (n_rows == 0)
    fail(ErrorCode::EmptyDesign,
         "no measurement contributes a full batch of " +
             std::to_string(steps_per_row) + " steps");

  DesignMatrices design;
  design.steps_per_row = steps_per_row;
  design.sensors = sensors;
  design.imu.resize(n_rows, static_cast<Eigen::Index>(steps_per_row) * m_step);
  design.grf.resize(n_rows, static_cast<Eigen::Index>(steps_per_row) * p_step);
  design.rows.reserve(n_rows);

  Eigen::Index row = 0;
  for (const auto& [b, e] : runs) {
    const std::size_t batches = (e - b) / steps_per_row;
    for (std::size_t g = 0; g < batches; ++g) {
      DesignMatrices::RowProvenance prov;
      prov.measurement_id = steps[b]->measurement_id;
      for (int s = 0; s < steps_per_row; ++s) {
        const std::size_t pos = b + g * steps_per_row + s;
        const Step& step = *steps[pos];
        prov.step_ids.push_back(step.step_id());
        prov.span_positions.push_back(pos);
        design.imu.row(row).segment(s * m_step, m_step) =
            select_sensor_channels(step, sensors);
        auto grf_block = design.grf.row(row).segment(s * p_step, p_step);
        grf_block.segment(0, Step::kSamples) =
            step.channel(chan::kGrfX).transpose();
        grf_block.segment(Step::kSamples, Step::kSamples) =
            step.channel(chan::kGrfY).transpose();
        grf_block.segment(2 * Step::kSamples, Step::kSamples) =
            step.channel(chan::kGrfZ).transpose();
      }
      design.rows.push_back(std::move(prov));
      ++row;
    }
  }
  return design;
}

SerModel ser_fit_embedded(TruncatedSvd imu_svd, TruncatedSvd grf_svd,
                          const SerHyper& hyper, SensorSet sensors,
                          int steps_per_row, Eigen::Index n_rows) {
  SerModel model;
  model.hyper = hyper;
  model.sensors = sensors;
  model.steps_per_row = steps_per_row;
  model.imu_svd = std::move(imu_svd);
  model.grf_svd = std::move(grf_svd);

  const int r_imu = model.imu_rank();
  const int r_grf = model.grf_rank();
  model.degenerate_fit = n_rows <= r_imu;

  model.coefficients.resize(r_grf, r_imu);
  model.intercepts.resize(r_grf);
  for (int j = 0; j < r_grf; ++j) {
    ElasticNetFit fit =
        fit_elastic_net(model.imu_svd.u, model.grf_svd.u.col(j), hyper.lambda1,
                        hyper.lambda2, hyper.penalize_intercept);
    model.coefficients.row(j) = fit.beta.transpose();
    model.intercepts[j] = fit.intercept;
  }
  return model;
}

SerModel ser_fit(const DesignMatrices& train, const SerHyper& hyper) {
  return ser_fit_embedded(truncated_svd(train.imu, hyper.imu_rank),
                          truncated_svd(train.grf, hyper.grf_rank), hyper,
                          train.sensors, train.steps_per_row,
                          train.row_count());
}

Eigen::RowVectorXd ser_predict(const SerModel& model,
                               const Eigen::RowVectorXd& x) {
  if (x.size() != model.imu_svd.v.rows())
    fail(ErrorCode::DimensionMismatch,
         "feature row has " + std::to_string(x.size()) + " values, model expects " +
             std::to_string(model.imu_svd.v.rows()));
  if (model.imu_svd.sigma.minCoeff() <= 1e-12)
    fail(ErrorCode::IllConditionedEmbedding,
         "a retained IMU singular value is at numerical zero");

  const Eigen::RowVectorXd embedding =
      (x * model.imu_svd.v).cwiseQuotient(model.imu_svd.sigma.transpose());
  const Eigen::RowVectorXd grf_embedding =
      (model.coefficients * embedding.transpose() + model.intercepts)
          .transpose();
  return grf_embedding * model.grf_svd.sigma.asDiagonal() *
         model.grf_svd.v.transpose();
}

Eigen::MatrixXd ser_predict_rows(const SerModel& model,
                                 const Eigen::MatrixXd& x_rows) {
  Eigen::MatrixXd out(x_rows.rows(), model.grf_svd.v.rows());
  for (Eigen::Index i = 0; i < x_rows.rows(); ++i)
    out.row(i) = ser_predict(model, x_rows.row(i));
  return out;
}

void save_ser_model(const SerModel& model, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format_version"] = kSerModelFormatVersion;
  j["model"] = "ser";
  j["sensors"] = to_string(model.sensors);
  j["steps_per_row"] = model.steps_per_row;
  j["hyper"] = {{"steps_per_row", model.hyper.steps_per_row},
                {"imu_rank", rank_policy_to_json(model.hyper.imu_rank)},
                {"grf_rank", rank_policy_to_json(model.hyper.grf_rank)},
                {"lambda1", model.hyper.lambda1},
                {"lambda2", model.hyper.lambda2},
                {"penalize_intercept", model.hyper.penalize_intercept}};
  j["degenerate_fit"] = model.degenerate_fit;
  j["imu_svd"] = {{"sigma", vector_to_json(model.imu_svd.sigma)},
                  {"v", matrix_to_json(model.imu_svd.v)},
                  {"energy_fraction", model.imu_svd.energy_fraction}};
  j["grf_svd"] = {{"sigma", vector_to_json(model.grf_svd.sigma)},
                  {"v", matrix_to_json(model.grf_svd.v)},
                  {"energy_fraction", model.grf_svd.energy_fraction}};
  j["coefficients"] = matrix_to_json(model.coefficients);
  j["intercepts"] = vector_to_json(model.intercepts);
  std::ofstream out(path);
  if (!out) fail(ErrorCode::MissingFile, "cannot write " + path.string());
  out << j.dump(1) << "\n";
}

SerModel load_ser_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::MissingFile, "cannot read " + path.string());
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::SchemaViolation, path.string() + ": " + e.what());
  }
  if (j.value("format_version", -1) != kSerModelFormatVersion ||
      j.value("model", "") != "ser")
    fail(ErrorCode::SchemaViolation, "not a SER model file: " + path.string());

  SerModel model;
  model.sensors = sensor_set_from_string(j.at("sensors").get<std::string>());
  model.steps_per_row = j.at("steps_per_row").get<int>();
  const auto& h = j.at("hyper");
  model.hyper.steps_per_row = h.at("steps_per_row").get<int>();
  model.hyper.imu_rank = rank_policy_from_json(h.at("imu_rank"));
  model.hyper.grf_rank = rank_policy_from_json(h.at("grf_rank"));
  model.hyper.lambda1 = h.at("lambda1").get<double>();
  model.hyper.lambda2 = h.at("lambda2").get<double>();
  model.hyper.penalize_intercept = h.at("penalize_intercept").get<bool>();
  model.degenerate_fit = j.at("degenerate_fit").get<bool>();
  model.imu_svd.sigma = vector_from_json(j.at("imu_svd").at("sigma"));
  model.imu_svd.v = matrix_from_json(j.at("imu_svd").at("v"));
  model.imu_svd.energy_fraction =
      j.at("imu_svd").at("energy_fraction").get<double>();
  model.grf_svd.sigma = vector_from_json(j.at("grf_svd").at("sigma"));
  model.grf_svd.v = matrix_from_json(j.at("grf_svd").at("v"));
  model.grf_svd.energy_fraction =
      j.at("grf_svd").at("energy_fraction").get<double>();
  model.coefficients = matrix_from_json(j.at("coefficients"));
  model.intercepts = vector_from_json(j.at("intercepts"));
  return model;
}

}  // namespace grf
