#include "grf/biomech.hpp"

#include <algorithm>
#include <cmath>

#include "grf/filter.hpp"

namespace grf {

namespace {

constexpr double kThresholdNewtons = 50.0;
constexpr double kLoadingRateWindowS = 0.025;

// Piecewise-linear view of one waveform on the window time base.
class Trace {
 public:
  Trace(const Eigen::VectorXd& values, double rate_hz)
      : values_(values), dt_(1.0 / rate_hz) {}

  double at(double t) const {
    const double pos = t / dt_;
    if (pos <= 0.0) return values_[0];
    const auto last = static_cast<double>(values_.size() - 1);
    if (pos >= last) return values_[values_.size() - 1];
    const auto k = static_cast<Eigen::Index>(pos);
    const double frac = pos - static_cast<double>(k);
    return (1.0 - frac) * values_[k] + frac * values_[k + 1];
  }

  /// Trapezoidal integral over [t0, t1] with interpolated endpoints.
  double integral(double t0, double t1) const {
    double acc = 0.0;
    double prev_t = t0;
    double prev_v = at(t0);
    for (Eigen::Index i = first_inner(t0); i <= last_inner(t1); ++i) {
      const double t = static_cast<double>(i) * dt_;
      acc += (values_[i] + prev_v) * (t - prev_t) / 2.0;
      prev_t = t;
      prev_v = values_[i];
    }
    acc += (at(t1) + prev_v) * (t1 - prev_t) / 2.0;
    return acc;
  }

  /// Length of {t in [t0, t1] : value(t) < 0} under linear interpolation.
  double negative_measure(double t0, double t1) const {
    double acc = 0.0;
    double prev_t = t0;
    double prev_v = at(t0);
    auto add_segment = [&acc](double ta, double va, double tb, double vb) {
      if (tb <= ta) return;
      if (va < 0.0 && vb < 0.0) {
        acc += tb - ta;
      } else if (va < 0.0 || vb < 0.0) {
        const double cross = ta + (tb - ta) * (0.0 - va) / (vb - va);
        acc += va < 0.0 ? cross - ta : tb - cross;
      }
    };
    for (Eigen::Index i = first_inner(t0); i <= last_inner(t1); ++i) {
      const double t = static_cast<double>(i) * dt_;
      add_segment(prev_t, prev_v, t, values_[i]);
      prev_t = t;
      prev_v = values_[i];
    }
    add_segment(prev_t, prev_v, t1, at(t1));
    return acc;
  }

  const Eigen::VectorXd& values() const { return values_; }
  double dt() const { return dt_; }

 private:
  Eigen::Index first_inner(double t0) const {
    return std::max<Eigen::Index>(
        static_cast<Eigen::Index>(std::ceil(t0 / dt_ + 1e-12)), 0);
  }
  Eigen::Index last_inner(double t1) const {
    return std::min<Eigen::Index>(
        static_cast<Eigen::Index>(std::floor(t1 / dt_ - 1e-12)),
        values_.size() - 1);
  }

  const Eigen::VectorXd& values_;
  double dt_;
};

}  // namespace

std::string to_string(NetImpulseMode m) {
  return m == NetImpulseMode::LiteralMinusOne ? "literal-minus-one"
                                              : "integral-of-excess";
}

NetImpulseMode net_impulse_mode_from_string(const std::string& name) {
  if (name == "literal-minus-one") return NetImpulseMode::LiteralMinusOne;
  if (name == "integral-of-excess") return NetImpulseMode::IntegralOfExcess;
  fail(ErrorCode::InvalidArgument,
       "unknown net-impulse mode '" + name +
           "' (expected literal-minus-one|integral-of-excess)");
}

const std::vector<std::string>& biomech_variable_names() {
  static const std::vector<std::string> names = {
      "loading_rate",         "contact_time",       "braking_time",
      "braking_percentage",   "active_peak",        "average_vertical_force",
      "net_vertical_impulse", "ap_velocity_change"};
  return names;
}

double biomech_variable(const BiomechReport& r, const std::string& name) {
  if (name == "loading_rate") return r.loading_rate_bw_per_s;
  if (name == "contact_time") return r.contact_time_s;
  if (name == "braking_time") return r.braking_time_s;
  if (name == "braking_percentage") return r.braking_fraction;
  if (name == "active_peak") return r.active_peak_bw;
  if (name == "average_vertical_force") return r.average_vertical_force_bw;
  if (name == "net_vertical_impulse") return r.net_vertical_impulse_bw_s;
  if (name == "ap_velocity_change") return r.ap_velocity_change_m_per_s;
  fail(ErrorCode::InvalidArgument, "unknown biomechanical variable '" + name + "'");
}

StanceEvents stance_events(const Eigen::VectorXd& gz_bw,
                           const Eigen::VectorXd& gy_bw, double rate_hz,
                           double body_weight_newtons) {
  if (body_weight_newtons <= 0.0)
    fail(ErrorCode::InvalidArgument, "body weight must be positive");
  if (gz_bw.size() != gy_bw.size() || gz_bw.size() < 2)
    fail(ErrorCode::DimensionMismatch, "gz and gy windows must match");
  const double threshold = kThresholdNewtons / body_weight_newtons;
  const double dt = 1.0 / rate_hz;

  Eigen::Index rise = -1;
  for (Eigen::Index i = 0; i < gz_bw.size(); ++i) {
    if (gz_bw[i] > threshold) {
      rise = i;
      break;
    }
  }
  if (rise < 0)
    fail(ErrorCode::NoStance, "vertical GRF never exceeds 50 N");

  StanceEvents ev;
  ev.start_s = rise == 0
                   ? 0.0
                   : (static_cast<double>(rise - 1) +
                      (threshold - gz_bw[rise - 1]) /
                          (gz_bw[rise] - gz_bw[rise - 1])) *
                         dt;

  Eigen::Index drop = -1;
  for (Eigen::Index i = rise + 1; i < gz_bw.size(); ++i) {
    if (gz_bw[i] < threshold) {
      drop = i;
      break;
    }
  }
  if (drop < 0)
    fail(ErrorCode::TruncatedStance, "vertical GRF never drops back below 50 N");
  ev.end_s = (static_cast<double>(drop - 1) +
              (gz_bw[drop - 1] - threshold) / (gz_bw[drop - 1] - gz_bw[drop])) *
             dt;
  ev.contact_s = ev.end_s - ev.start_s;
  ev.braking_s = Trace(gy_bw, rate_hz).negative_measure(ev.start_s, ev.end_s);
  return ev;
}

StanceEvents stance_events(const Step& grf_step, double body_weight_newtons) {
  return stance_events(grf_step.channel(chan::kGrfZ),
                       grf_step.channel(chan::kGrfY), Step::kRateHz,
                       body_weight_newtons);
}

double loading_rate(const Eigen::VectorXd& gz_bw, double rate_hz,
                    const StanceEvents& events) {
  if (events.start_s + kLoadingRateWindowS > events.end_s)
    fail(ErrorCode::StanceTooShort,
         "stance ends within the 25 ms loading-rate window");
  const Trace gz(gz_bw, rate_hz);
  return (gz.at(events.start_s + kLoadingRateWindowS) - gz.at(events.start_s)) /
         kLoadingRateWindowS;
}

double loading_rate(const Step& grf_step, const StanceEvents& events) {
  return loading_rate(grf_step.channel(chan::kGrfZ), Step::kRateHz, events);
}

double active_peak(const Eigen::VectorXd& gz_bw, double rate_hz,
                   const StanceEvents& events) {
  const Trace gz(gz_bw, rate_hz);
  const double t0 = events.start_s + 0.3 * events.contact_s;
  const double t1 = events.end_s;
  double peak = std::max(gz.at(t0), gz.at(t1));
  const auto first = static_cast<Eigen::Index>(std::ceil(t0 / gz.dt()));
  const auto last = static_cast<Eigen::Index>(std::floor(t1 / gz.dt()));
  for (Eigen::Index i = std::max<Eigen::Index>(first, 0);
       i <= std::min<Eigen::Index>(last, gz_bw.size() - 1); ++i)
    peak = std::max(peak, gz_bw[i]);
  return peak;
}

double active_peak(const Step& grf_step, const StanceEvents& events) {
  return active_peak(grf_step.channel(chan::kGrfZ), Step::kRateHz, events);
}

VerticalAggregates vertical_aggregates(const Eigen::VectorXd& gz_bw,
                                       double rate_hz,
                                       const StanceEvents& events,
                                       NetImpulseMode mode) {
  VerticalAggregates agg;
  const double integral =
      Trace(gz_bw, rate_hz).integral(events.start_s, events.end_s);
  agg.average_bw = integral / events.contact_s;
  agg.net_impulse_bw_s = mode == NetImpulseMode::LiteralMinusOne
                             ? integral - 1.0
                             : integral - events.contact_s;
  return agg;
}

VerticalAggregates vertical_aggregates(const Step& grf_step,
                                       const StanceEvents& events,
                                       NetImpulseMode mode) {
  return vertical_aggregates(grf_step.channel(chan::kGrfZ), Step::kRateHz,
                             events, mode);
}

double ap_velocity_change(const Eigen::VectorXd& gy_bw, double rate_hz,
                          const StanceEvents& events) {
  return 9.81 * Trace(gy_bw, rate_hz).integral(events.start_s, events.end_s);
}

double ap_velocity_change(const Step& grf_step, const StanceEvents& events) {
  return ap_velocity_change(grf_step.channel(chan::kGrfY), Step::kRateHz,
                            events);
}

BiomechReport compute_all(const Step& raw_grf_step, double body_weight_newtons,
                          NetImpulseMode mode) {
  const ButterworthLowpass filter(4, 50.0, Step::kRateHz);
  const Eigen::VectorXd gz = filter.filtfilt(raw_grf_step.channel(chan::kGrfZ));
  const Eigen::VectorXd gy = filter.filtfilt(raw_grf_step.channel(chan::kGrfY));

  auto with_context = [](const char* variable, const Error& e) -> Error {
    return Error(e.code(), std::string(variable) + ": " + e.what());
  };

  BiomechReport report;
  StanceEvents events;
  try {
    events = stance_events(gz, gy, Step::kRateHz, body_weight_newtons);
  } catch (const Error& e) {
    throw with_context("stance_events", e);
  }
  report.contact_time_s = events.contact_s;
  report.braking_time_s = events.braking_s;
  report.braking_fraction = events.braking_s / events.contact_s;
  try {
    report.loading_rate_bw_per_s = loading_rate(gz, Step::kRateHz, events);
  } catch (const Error& e) {
    throw with_context("loading_rate", e);
  }
  report.active_peak_bw = active_peak(gz, Step::kRateHz, events);
  const VerticalAggregates agg =
      vertical_aggregates(gz, Step::kRateHz, events, mode);
  report.average_vertical_force_bw = agg.average_bw;
  report.net_vertical_impulse_bw_s = agg.net_impulse_bw_s;
  report.ap_velocity_change_m_per_s =
      ap_velocity_change(gy, Step::kRateHz, events);
  return report;
}

}  // namespace grf
