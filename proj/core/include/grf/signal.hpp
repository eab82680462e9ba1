#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "grf/errors.hpp"

namespace grf {

/// Canonical channel labels used across measurements and extracted steps.
/// Raw measurement files use the *_left/_right shank channels; extracted
/// steps carry the side-resolved acc_shank_norm / gyro_shank_norm instead.
namespace chan {
inline constexpr const char* kAccSacrumX = "acc_sacrum_x";
inline constexpr const char* kAccSacrumY = "acc_sacrum_y";
inline constexpr const char* kAccSacrumZ = "acc_sacrum_z";
inline constexpr const char* kAccSacrumNorm = "acc_sacrum_norm";
inline constexpr const char* kAccShankNorm = "acc_shank_norm";
inline constexpr const char* kGyroSacrumNorm = "gyro_sacrum_norm";
inline constexpr const char* kGyroShankNorm = "gyro_shank_norm";
inline constexpr const char* kGrfX = "grf_x";
inline constexpr const char* kGrfY = "grf_y";
inline constexpr const char* kGrfZ = "grf_z";
}  // namespace chan

/// Uniformly sampled multichannel time series. Data is samples x channels;
/// values must be finite and the rate positive.
class SampledSignal {
 public:
  SampledSignal(double rate_hz, std::vector<std::string> channels,
                Eigen::MatrixXd data, double start_time_s = 0.0);

  double rate() const { return rate_; }
  double start_time() const { return start_time_; }
  Eigen::Index sample_count() const { return data_.rows(); }
  Eigen::Index channel_count() const { return data_.cols(); }
  double duration() const { return static_cast<double>(data_.rows()) / rate_; }
  double time_at(Eigen::Index i) const {
    return start_time_ + static_cast<double>(i) / rate_;
  }

  const std::vector<std::string>& channels() const { return channels_; }
  const Eigen::MatrixXd& data() const { return data_; }
  Eigen::MatrixXd& data() { return data_; }

  /// Index of a channel label; throws unknown-channel if absent.
  Eigen::Index channel_index(const std::string& label) const;
  bool has_channel(const std::string& label) const;
  Eigen::VectorXd channel(const std::string& label) const {
    return data_.col(channel_index(label));
  }

  /// Single-channel view-copy of one column, keeping rate and start time.
  SampledSignal extract_channel(const std::string& label) const;

 private:
  double rate_;
  double start_time_;
  std::vector<std::string> channels_;
  Eigen::MatrixXd data_;
};

enum class Side { Left, Right };

inline const char* to_string(Side s) { return s == Side::Left ? "left" : "right"; }
Side side_from_string(const std::string& s);

/// One foot contact: a fixed 200-sample (400 ms at 500 Hz) window over the
/// step's channels, with provenance back to athlete/collection/measurement.
struct Step {
  static constexpr Eigen::Index kSamples = 200;
  static constexpr double kRateHz = 500.0;

  std::vector<std::string> channels;
  Eigen::MatrixXd data;  // kSamples x channels
  Side side = Side::Left;
  std::string athlete_id;
  std::string collection_id;
  std::string measurement_id;
  int index_in_measurement = 0;
  double speed_mps = 0.0;
  double body_weight_newtons = 0.0;

  /// Validates the T=200 and body-weight invariants.
  static Step make(std::vector<std::string> channels, Eigen::MatrixXd data,
                   Side side, double body_weight_newtons);

  std::string step_id() const {
    return measurement_id + "#" + std::to_string(index_in_measurement);
  }

  Eigen::Index channel_index(const std::string& label) const;
  Eigen::VectorXd channel(const std::string& label) const {
    return data.col(channel_index(label));
  }
};

/// Channel layout of a fully preprocessed step, in the documented order:
/// sacrum before shanks, acceleration before angular velocity, x/y/z for
/// 3D blocks, GRF components last.
const std::vector<std::string>& step_channel_layout();

/// Input-signal combinations for the prediction tasks.
enum class SensorSet { All, Acc, Ang, Sacrum, Shanks, SacAcc3d, SacAcc };

inline constexpr std::array<SensorSet, 7> kAllSensorSets = {
    SensorSet::All,    SensorSet::Acc,      SensorSet::Ang,   SensorSet::Sacrum,
    SensorSet::Shanks, SensorSet::SacAcc3d, SensorSet::SacAcc};

std::string to_string(SensorSet s);
SensorSet sensor_set_from_string(const std::string& name);

/// Step channels read by a sensor set, in feature order.
const std::vector<std::string>& sensor_channels(SensorSet s);

/// Number of feature values per step for a sensor set (channels x 200).
Eigen::Index sensor_values_per_step(SensorSet s);

/// Flattens the sensor channels of one step into a feature row,
/// time-major within each channel.
Eigen::RowVectorXd select_sensor_channels(const Step& step, SensorSet sensors);

/// Per-sample Euclidean norm over three channels; returns a single-channel
/// signal labeled `out_label`.
SampledSignal l2_norm_channels(const SampledSignal& signal,
                               const std::array<std::string, 3>& triple,
                               const std::string& out_label = "l2_norm");

/// Divides every sample by the body weight; channel units become BW.
SampledSignal normalize_by_bodyweight(const SampledSignal& grf_newtons,
                                      double body_weight_newtons);

}  // namespace grf
