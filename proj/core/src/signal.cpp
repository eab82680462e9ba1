#include "grf/signal.hpp"

#include <algorithm>

namespace grf {

SampledSignal::SampledSignal(double rate_hz, std::vector<std::string> channels,
                             Eigen::MatrixXd data, double start_time_s)
    : rate_(rate_hz),
      start_time_(start_time_s),
      channels_(std::move(channels)),
      data_(std::move(data)) {
  if (rate_ <= 0.0)
    fail(ErrorCode::InvalidArgument, "sample rate must be positive");
  if (static_cast<Eigen::Index>(channels_.size()) != data_.cols())
    fail(ErrorCode::InvalidArgument, "channel label count does not match data columns");
  if (!data_.allFinite())
    fail(ErrorCode::NonFiniteValue, "signal contains NaN or Inf samples");
}

Eigen::Index SampledSignal::channel_index(const std::string& label) const {
  auto it = std::find(channels_.begin(), channels_.end(), label);
  if (it == channels_.end())
    fail(ErrorCode::UnknownChannel, "no channel named '" + label + "'");
  return static_cast<Eigen::Index>(it - channels_.begin());
}

bool SampledSignal::has_channel(const std::string& label) const {
  return std::find(channels_.begin(), channels_.end(), label) != channels_.end();
}

SampledSignal SampledSignal::extract_channel(const std::string& label) const {
  return SampledSignal(rate_, {label}, data_.col(channel_index(label)), start_time_);
}

Side side_from_string(const std::string& s) {
  if (s == "left") return Side::Left;
  if (s == "right") return Side::Right;
  fail(ErrorCode::SchemaViolation, "unknown side '" + s + "'");
}

Step Step::make(std::vector<std::string> channels, Eigen::MatrixXd data,
                Side side, double body_weight_newtons) {
  if (data.rows() != kSamples)
    fail(ErrorCode::InvalidArgument,
         "a step must hold exactly " + std::to_string(kSamples) + " samples, got " +
             std::to_string(data.rows()));
  if (static_cast<Eigen::Index>(channels.size()) != data.cols())
    fail(ErrorCode::InvalidArgument, "channel label count does not match data columns");
  if (body_weight_newtons <= 0.0)
    fail(ErrorCode::InvalidArgument, "body weight must be positive");
  if (!data.allFinite())
    fail(ErrorCode::NonFiniteValue, "step contains NaN or Inf samples");
  Step step;
  step.channels = std::move(channels);
  step.data = std::move(data);
  step.side = side;
  step.body_weight_newtons = body_weight_newtons;
  return step;
}

Eigen::Index Step::channel_index(const std::string& label) const {
  auto it = std::find(channels.begin(), channels.end(), label);
  if (it == channels.end())
    fail(ErrorCode::UnknownChannel, "step has no channel named '" + label + "'");
  return static_cast<Eigen::Index>(it - channels.begin());
}

const std::vector<std::string>& step_channel_layout() {
  static const std::vector<std::string> layout = {
      chan::kAccSacrumX,    chan::kAccSacrumY,   chan::kAccSacrumZ,
      chan::kAccSacrumNorm, chan::kAccShankNorm, chan::kGyroSacrumNorm,
      chan::kGyroShankNorm, chan::kGrfX,         chan::kGrfY,
      chan::kGrfZ};
  return layout;
}

std::string to_string(SensorSet s) {
  switch (s) {
    case SensorSet::All: return "all";
    case SensorSet::Acc: return "acc";
    case SensorSet::Ang: return "ang";
    case SensorSet::Sacrum: return "sacrum";
    case SensorSet::Shanks: return "shanks";
    case SensorSet::SacAcc3d: return "sac-acc3d";
    case SensorSet::SacAcc: return "sac-acc";
  }
  return "?";
}

SensorSet sensor_set_from_string(const std::string& name) {
  for (SensorSet s : kAllSensorSets)
    if (to_string(s) == name) return s;
  fail(ErrorCode::InvalidArgument,
       "unknown sensor set '" + name +
           "' (expected all|acc|ang|sacrum|shanks|sac-acc3d|sac-acc)");
}

const std::vector<std::string>& sensor_channels(SensorSet s) {
  // Fixed order: sacrum before shanks, acceleration before angular velocity.
  static const std::vector<std::string> all = {
      chan::kAccSacrumNorm, chan::kAccShankNorm, chan::kGyroSacrumNorm,
      chan::kGyroShankNorm};
  static const std::vector<std::string> acc = {chan::kAccSacrumNorm,
                                               chan::kAccShankNorm};
  static const std::vector<std::string> ang = {chan::kGyroSacrumNorm,
                                               chan::kGyroShankNorm};
  static const std::vector<std::string> sacrum = {chan::kAccSacrumNorm,
                                                  chan::kGyroSacrumNorm};
  static const std::vector<std::string> shanks = {chan::kAccShankNorm,
                                                  chan::kGyroShankNorm};
  static const std::vector<std::string> sac3d = {
      chan::kAccSacrumX, chan::kAccSacrumY, chan::kAccSacrumZ};
  static const std::vector<std::string> sac = {chan::kAccSacrumNorm};
  switch (s) {
    case SensorSet::All: return all;
    case SensorSet::Acc: return acc;
    case SensorSet::Ang: return ang;
    case SensorSet::Sacrum: return sacrum;
    case SensorSet::Shanks: return shanks;
    case SensorSet::SacAcc3d: return sac3d;
    case SensorSet::SacAcc: return sac;
  }
  return sac;
}

Eigen::Index sensor_values_per_step(SensorSet s) {
  return static_cast<Eigen::Index>(sensor_channels(s).size()) * Step::kSamples;
}

Eigen::RowVectorXd select_sensor_channels(const Step& step, SensorSet sensors) {
  const auto& labels = sensor_channels(sensors);
  Eigen::RowVectorXd row(static_cast<Eigen::Index>(labels.size()) * Step::kSamples);
  Eigen::Index offset = 0;
  for (const auto& label : labels) {
    row.segment(offset, Step::kSamples) = step.channel(label).transpose();
    offset += Step::kSamples;
  }
  return row;
}

SampledSignal l2_norm_channels(const SampledSignal& signal,
                               const std::array<std::string, 3>& triple,
                               const std::string& out_label) {
  const Eigen::Index ix = signal.channel_index(triple[0]);
  const Eigen::Index iy = signal.channel_index(triple[1]);
  const Eigen::Index iz = signal.channel_index(triple[2]);
  const auto& d = signal.data();
  Eigen::MatrixXd out(d.rows(), 1);
  out.col(0) = (d.col(ix).array().square() + d.col(iy).array().square() +
                d.col(iz).array().square())
                   .sqrt();
  return SampledSignal(signal.rate(), {out_label}, std::move(out),
                       signal.start_time());
}

SampledSignal normalize_by_bodyweight(const SampledSignal& grf_newtons,
                                      double body_weight_newtons) {
  if (body_weight_newtons <= 0.0)
    fail(ErrorCode::InvalidArgument, "body weight must be positive");
  return SampledSignal(grf_newtons.rate(), grf_newtons.channels(),
                       grf_newtons.data() / body_weight_newtons,
                       grf_newtons.start_time());
}

}  // namespace grf
