#include "grf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "grf/rng.hpp"

namespace grf {

double stance_gz(const StanceShape& shape, double tau_s) {
  const double u = tau_s / shape.contact_s;
  if (u < 0.0 || u > 1.0) return 0.0;
  const double active = shape.active_peak_bw * std::sin(std::numbers::pi * u);
  const double z = (u - shape.impact_frac) / 0.05;
  const double impact = shape.impact_prominence * 0.45 * shape.active_peak_bw *
                        std::exp(-0.5 * z * z);
  return shape.amp_factor * (active + impact);
}

double stance_gy(const StanceShape& shape, double tau_s) {
  const double u = tau_s / shape.contact_s;
  if (u < 0.0 || u > 1.0) return 0.0;
  // Braking outweighs propulsion slightly so the net A/P impulse is nonzero.
  return -shape.amp_factor * shape.brake_amp_bw *
         (std::sin(2.0 * std::numbers::pi * u) +
          0.25 * std::sin(std::numbers::pi * u));
}

double stance_gx(const StanceShape& shape, double tau_s) {
  const double u = tau_s / shape.contact_s;
  if (u < 0.0 || u > 1.0) return 0.0;
  return shape.amp_factor * shape.side_sign * shape.ml_amp_bw *
         std::sin(3.0 * std::numbers::pi * u);
}

namespace {

constexpr double kJumpFlightS = 0.25;
constexpr double kJumpPulseS = 0.40;
constexpr double kStrikeS = 0.10;  // duration of the shank strike transient

struct AthleteStyle {
  double body_weight_n;
  double impact_prominence;
  double impact_frac;
  double step_interval_s;
  double contact_base_s;
  double active_peak_base_bw;
  double brake_amp_bw;
  double ml_amp_bw;
  double gain_acc_sacrum, gain_acc_shank, gain_gyro_sacrum, gain_gyro_shank;
  double asym;  // left/right amplitude asymmetry
  Eigen::Vector3d dir_acc_shank_l, dir_acc_shank_r;
  Eigen::Vector3d dir_gyro_sacrum, dir_gyro_shank_l, dir_gyro_shank_r;
};

Eigen::Vector3d jittered_direction(Rng& rng, double x, double y, double z) {
  Eigen::Vector3d d(x + 0.05 * rng.gaussian(), y + 0.05 * rng.gaussian(),
                    z + 0.05 * rng.gaussian());
  return d.normalized();
}

AthleteStyle draw_style(Rng& rng) {
  AthleteStyle s{};
  s.body_weight_n = rng.uniform(560.0, 780.0);
  const double fs = rng.uniform();
  const double u = rng.uniform();
  if (fs < 0.34)
    s.impact_prominence = 0.65 + 0.30 * u;  // heel strike
  else if (fs < 0.67)
    s.impact_prominence = 0.35 + 0.30 * u;  // midfoot
  else
    s.impact_prominence = 0.05 + 0.25 * u;  // forefoot
  s.impact_frac = rng.uniform(0.13, 0.19);
  s.step_interval_s = rng.uniform(0.31, 0.37);
  s.contact_base_s = rng.uniform(0.21, 0.25);
  s.active_peak_base_bw = rng.uniform(2.2, 2.7);
  s.brake_amp_bw = rng.uniform(0.18, 0.28);
  s.ml_amp_bw = rng.uniform(0.03, 0.07);
  s.gain_acc_sacrum = rng.uniform(0.88, 1.12);
  s.gain_acc_shank = rng.uniform(0.88, 1.12);
  s.gain_gyro_sacrum = rng.uniform(0.88, 1.12);
  s.gain_gyro_shank = rng.uniform(0.88, 1.12);
  s.asym = rng.uniform(0.97, 1.03);
  s.dir_acc_shank_l = jittered_direction(rng, 0.30, 0.34, 0.89);
  s.dir_acc_shank_r = jittered_direction(rng, 0.30, -0.34, 0.89);
  s.dir_gyro_sacrum = jittered_direction(rng, 0.10, 0.90, 0.40);
  s.dir_gyro_shank_l = jittered_direction(rng, 0.95, 0.25, 0.15);
  s.dir_gyro_shank_r = jittered_direction(rng, 0.95, -0.25, 0.15);
  return s;
}

struct StepEvent {
  double start_s;
  StanceShape shape;      // drives the force-plate (GRF) channels
  StanceShape imu_shape;  // drives the IMU channels; excludes the cyclic
                          // amplitude pattern, which only the plates see
  Side side;
  double rho;         // per-step impact prominence
  double amp;         // per-step GRF amplitude factor
  double imu_amp;     // amplitude factor visible to the IMU channels
  double strike_amp;  // shank strike transient peak, m/s^2
};

struct MeasurementModel {
  AthleteStyle style;
  double speed_mps;
  double clock_scale;   // IMU -> GRF
  double clock_offset;  // seconds
  double t_jump1, t_jump2;  // GRF clock
  double run_begin, run_end;
  double t_end;
  std::vector<StepEvent> steps;
  std::vector<int> left_steps, right_steps;  // indices into steps

  double jump_pulse(double tau) const {
    if (tau < 0.0) return 0.0;
    if (tau >= kJumpPulseS) return 1.0;
    return 3.5 * std::exp(-tau / 0.05) + (1.0 - std::exp(-tau / 0.06));
  }

  static double ramp(double t, double t0, double t1, double v0, double v1) {
    if (t <= t0) return v0;
    if (t >= t1) return v1;
    return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
  }

  /// Standing / flight / jump background of the vertical GRF, in BW.
  double background(double t) const {
    if (t < t_jump1 - kJumpFlightS)
      return ramp(t, t_jump1 - kJumpFlightS - 0.05, t_jump1 - kJumpFlightS, 1.0, 0.0);
    if (t < t_jump1) return 0.0;
    if (t < t_jump1 + kJumpPulseS) return jump_pulse(t - t_jump1);
    if (t < run_begin)
      return ramp(t, run_begin - 0.30, run_begin - 0.10, 1.0, 0.0);
    if (t < run_end + 0.10) return 0.0;
    if (t < t_jump2 - kJumpFlightS - 0.05)
      return ramp(t, run_end + 0.10, run_end + 0.30, 0.0, 1.0);
    if (t < t_jump2 - kJumpFlightS)
      return ramp(t, t_jump2 - kJumpFlightS - 0.05, t_jump2 - kJumpFlightS, 1.0, 0.0);
    if (t < t_jump2) return 0.0;
    if (t < t_jump2 + kJumpPulseS) return jump_pulse(t - t_jump2);
    return 1.0;
  }

  /// Index of the step whose stance covers t, or -1.
  int active_step(double t) const {
    auto it = std::upper_bound(
        steps.begin(), steps.end(), t,
        [](double value, const StepEvent& e) { return value < e.start_s; });
    if (it == steps.begin()) return -1;
    const auto idx = static_cast<int>(it - steps.begin()) - 1;
    const StepEvent& e = steps[idx];
    return t <= e.start_s + e.shape.contact_s ? idx : -1;
  }

  void grf_bw(double t, double* gx, double* gy, double* gz,
              bool imu_view = false) const {
    *gx = 0.0;
    *gy = 0.0;
    *gz = background(t);
    const int i = active_step(t);
    if (i >= 0) {
      const double tau = t - steps[i].start_s;
      const StanceShape& shape = imu_view ? steps[i].imu_shape : steps[i].shape;
      *gx += stance_gx(shape, tau);
      *gy += stance_gy(shape, tau);
      *gz += stance_gz(shape, tau);
    }
  }

  static double strike_triangle(double tau) {
    if (tau < 0.0 || tau >= kStrikeS) return 0.0;
    const double half = kStrikeS / 2.0;
    return tau < half ? tau / half : (kStrikeS - tau) / half;
  }

  /// Magnitude of the shank acceleration for one side, m/s^2 (no noise).
  double shank_acc_mag(Side side, double t) const {
    const auto& own = side == Side::Left ? left_steps : right_steps;
    double mag = 9.81 * style.gain_acc_shank * 0.5 * background(t);
    // Own-stance load and strike transient.
    const int i = active_step(t);
    if (i >= 0 && steps[i].side == side) {
      const double tau = t - steps[i].start_s;
      mag += 9.81 * style.gain_acc_shank * 0.45 *
             stance_gz(steps[i].imu_shape, tau);
      mag += steps[i].strike_amp * strike_triangle(tau);
    }
    // Swing hump between consecutive own stances.
    for (std::size_t k = 0; k + 1 < own.size(); ++k) {
      const StepEvent& a = steps[own[k]];
      const StepEvent& b = steps[own[k + 1]];
      const double swing0 = a.start_s + a.shape.contact_s;
      if (t > swing0 && t < b.start_s) {
        const double phase = (t - swing0) / (b.start_s - swing0);
        const double sp = std::sin(std::numbers::pi * phase);
        mag += 6.0 * style.gain_acc_shank * sp * sp;
        break;
      }
    }
    return mag;
  }

  double gyro_sacrum_mag(double t) const {
    double mag = 0.3 * style.gain_gyro_sacrum;
    mag += 0.4 * std::max(background(t) - 1.0, 0.0);
    const int i = active_step(t);
    if (i >= 0) {
      const double u = (t - steps[i].start_s) / steps[i].shape.contact_s;
      mag += style.gain_gyro_sacrum *
             (1.0 * (speed_mps / 3.8) + 0.6 * steps[i].rho) *
             steps[i].imu_amp * std::sin(std::numbers::pi * u);
    }
    return mag;
  }

  double gyro_shank_mag(Side side, double t) const {
    const auto& own = side == Side::Left ? left_steps : right_steps;
    double mag = 0.2 * style.gain_gyro_shank;
    const int i = active_step(t);
    if (i >= 0 && steps[i].side == side) {
      const double u = (t - steps[i].start_s) / steps[i].shape.contact_s;
      mag += style.gain_gyro_shank * (0.8 + 0.7 * speed_mps / 3.8) *
             steps[i].imu_amp * std::sin(std::numbers::pi * u);
    }
    for (std::size_t k = 0; k + 1 < own.size(); ++k) {
      const StepEvent& a = steps[own[k]];
      const StepEvent& b = steps[own[k + 1]];
      const double swing0 = a.start_s + a.shape.contact_s;
      if (t > swing0 && t < b.start_s) {
        const double phase = (t - swing0) / (b.start_s - swing0);
        const double sp = std::sin(std::numbers::pi * phase);
        mag += style.gain_gyro_shank * (2.2 + 2.2 * speed_mps / 3.8) *
               b.imu_amp * sp * sp;
        break;
      }
    }
    return mag;
  }
};

MeasurementModel build_measurement(const SynthConfig& config,
                                   const AthleteStyle& style, double speed,
                                   std::uint64_t meas_index) {
  MeasurementModel m;
  m.style = style;
  m.speed_mps = speed;

  Rng rng = Rng::stream(config.seed, "measurement", meas_index);
  m.clock_scale = 1.0 + rng.uniform(-5e-4, 5e-4);
  m.clock_offset = rng.uniform(-0.04, 0.04);

  // Jump landings fall exactly on the IMU grid so detection quantization
  // stays within one GRF sample.
  const double imu_j1 =
      std::round(rng.uniform(0.9, 1.1) * Step::kRateHz) / Step::kRateHz;
  m.t_jump1 = m.clock_scale * imu_j1 + m.clock_offset;
  m.run_begin = m.t_jump1 + 1.2;

  const double contact_meas =
      style.contact_base_s * std::pow(3.8 / speed, 0.3);
  const double peak_meas =
      style.active_peak_base_bw * std::pow(speed / 3.8, 0.25);
  const double strike_speed = std::sqrt(speed / 3.8);

  Side side = rng.uniform() < 0.5 ? Side::Left : Side::Right;
  double t = m.run_begin;
  for (int i = 0; i < config.steps_per_measurement; ++i) {
    StepEvent e;
    e.start_s = t;
    e.side = side;
    double pattern = 0.0;
    if (config.style_period > 0)
      pattern = 0.10 * std::sin(2.0 * std::numbers::pi *
                                static_cast<double>(i % config.style_period) /
                                config.style_period);
    const double jitter = 0.015 * config.noise_scale * rng.gaussian();
    const double asym = side == Side::Left ? style.asym : 2.0 - style.asym;
    e.amp = std::clamp(1.0 + pattern + jitter, 0.8, 1.2) * asym;
    e.imu_amp = std::clamp(1.0 + jitter, 0.8, 1.2) * asym;
    e.rho = std::clamp(style.impact_prominence + 0.02 * rng.gaussian(), 0.0, 1.0);

    e.shape.contact_s = contact_meas * (1.0 + 0.008 * rng.gaussian());
    e.shape.active_peak_bw = peak_meas;
    e.shape.impact_prominence = e.rho;
    e.shape.impact_frac = style.impact_frac;
    e.shape.brake_amp_bw = style.brake_amp_bw;
    e.shape.ml_amp_bw = style.ml_amp_bw;
    e.shape.amp_factor = e.amp;
    e.shape.side_sign = side == Side::Left ? 1 : -1;
    e.imu_shape = e.shape;
    e.imu_shape.amp_factor = e.imu_amp;
    e.strike_amp = 9.81 * style.gain_acc_shank * (0.55 + 0.45 * e.rho) *
                   e.imu_amp * strike_speed * 7.0;

    if (side == Side::Left)
      m.left_steps.push_back(i);
    else
      m.right_steps.push_back(i);
    m.steps.push_back(e);

    t += style.step_interval_s * (1.0 + 0.01 * std::clamp(rng.gaussian(), -2.0, 2.0));
    side = side == Side::Left ? Side::Right : Side::Left;
  }
  m.run_end = m.steps.back().start_s + m.steps.back().shape.contact_s;

  const double imu_j2 =
      std::round((m.run_end + 1.2 - m.clock_offset) / m.clock_scale *
                 Step::kRateHz) /
      Step::kRateHz;
  m.t_jump2 = m.clock_scale * imu_j2 + m.clock_offset;
  m.t_end = m.t_jump2 + 1.0;
  return m;
}

}  // namespace

DatasetIndex synth_generate(const SynthConfig& config,
                            const std::filesystem::path& out_dir) {
  if (config.athletes < 1 || config.collections_per_athlete < 1 ||
      config.speeds_mps.empty())
    fail(ErrorCode::InvalidArgument, "athlete/collection/speed counts must be positive");
  if (config.steps_per_measurement < 60)
    fail(ErrorCode::InvalidArgument,
         "measurements hold at least 60 steps; got " +
             std::to_string(config.steps_per_measurement));
  if (config.noise_scale < 0.0)
    fail(ErrorCode::InvalidArgument, "noise scale must be >= 0");

  std::filesystem::create_directories(out_dir);
  DatasetIndex index;
  index.root = out_dir;
  index.provenance = {{"generator", "synthetic-gait"},
                      {"seed", config.seed},
                      {"athletes", config.athletes},
                      {"collections_per_athlete", config.collections_per_athlete},
                      {"speeds_mps", config.speeds_mps},
                      {"steps_per_measurement", config.steps_per_measurement},
                      {"style_period", config.style_period},
                      {"noise_scale", config.noise_scale}};

  std::uint64_t meas_counter = 0;
  for (int ai = 0; ai < config.athletes; ++ai) {
    Rng style_rng = Rng::stream(config.seed, "athlete", ai);
    const AthleteStyle style = draw_style(style_rng);
    char athlete_id[16];
    std::snprintf(athlete_id, sizeof(athlete_id), "a%02d", ai + 1);
    index.athletes.push_back({athlete_id, style.body_weight_n});

    for (int ci = 0; ci < config.collections_per_athlete; ++ci) {
      CollectionInfo collection;
      collection.athlete_id = athlete_id;
      collection.id = std::string(athlete_id) + "-c" +
                      (ci + 1 < 10 ? "0" : "") + std::to_string(ci + 1);
      for (std::size_t si = 0; si < config.speeds_mps.size(); ++si) {
        const double speed = config.speeds_mps[si];
        MeasurementInfo mi;
        mi.id = collection.id + "-m" + (si + 1 < 10 ? "0" : "") +
                std::to_string(si + 1);
        mi.speed_mps = speed;
        mi.imu_file = mi.id + "_imu.csv";
        mi.grf_file = mi.id + "_grf.csv";

        const MeasurementModel model =
            build_measurement(config, style, speed, meas_counter);
        mi.jump_windows = {{{model.t_jump1 - 0.5, model.t_jump1 + 0.7},
                            {model.t_jump2 - 0.5, model.t_jump2 + 0.7}}};

        // GRF file: 1000 Hz, Newtons, on the GRF clock.
        {
          Rng noise = Rng::stream(config.seed, "noise-grf", meas_counter);
          const auto n = static_cast<Eigen::Index>(std::floor(model.t_end * 1000.0));
          Eigen::MatrixXd data(n, 3);
          for (Eigen::Index k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) / 1000.0;
            double gx, gy, gz;
            model.grf_bw(t, &gx, &gy, &gz);
            const double sigma = 2.0 * config.noise_scale;
            data(k, 0) = style.body_weight_n * gx + sigma * noise.gaussian();
            data(k, 1) = style.body_weight_n * gy + sigma * noise.gaussian();
            data(k, 2) = style.body_weight_n * gz + sigma * noise.gaussian();
          }
          save_signal_csv(SampledSignal(1000.0, grf_channel_layout(), data),
                          out_dir / mi.grf_file);
        }

        // IMU file: 500 Hz on the drifted IMU clock.
        {
          Rng noise = Rng::stream(config.seed, "noise-imu", meas_counter);
          const double imu_end = (model.t_end - model.clock_offset) / model.clock_scale;
          const auto n = static_cast<Eigen::Index>(std::floor(imu_end * 500.0));
          Eigen::MatrixXd data(n, 18);
          const double acc_sig = 0.25 * config.noise_scale;
          const double gyro_sig = 0.04 * config.noise_scale;
          for (Eigen::Index k = 0; k < n; ++k) {
            const double t =
                model.clock_scale * (static_cast<double>(k) / 500.0) +
                model.clock_offset;
            double gx, gy, gz;
            model.grf_bw(t, &gx, &gy, &gz, /*imu_view=*/true);
            const double g = 9.81 * style.gain_acc_sacrum;
            data(k, 0) = g * (0.85 * gx + 0.04 * gz) + acc_sig * noise.gaussian();
            data(k, 1) = g * (0.75 * gy + 0.07 * gz) + acc_sig * noise.gaussian();
            data(k, 2) = g * (0.96 * gz) + acc_sig * noise.gaussian();
            const double mag_l = model.shank_acc_mag(Side::Left, t);
            const double mag_r = model.shank_acc_mag(Side::Right, t);
            for (int c = 0; c < 3; ++c) {
              data(k, 3 + c) =
                  mag_l * style.dir_acc_shank_l[c] + acc_sig * noise.gaussian();
              data(k, 6 + c) =
                  mag_r * style.dir_acc_shank_r[c] + acc_sig * noise.gaussian();
            }
            const double gs = model.gyro_sacrum_mag(t);
            const double gl = model.gyro_shank_mag(Side::Left, t);
            const double gr = model.gyro_shank_mag(Side::Right, t);
            for (int c = 0; c < 3; ++c) {
              data(k, 9 + c) =
                  gs * style.dir_gyro_sacrum[c] + gyro_sig * noise.gaussian();
              data(k, 12 + c) =
                  gl * style.dir_gyro_shank_l[c] + gyro_sig * noise.gaussian();
              data(k, 15 + c) =
                  gr * style.dir_gyro_shank_r[c] + gyro_sig * noise.gaussian();
            }
          }
          save_signal_csv(SampledSignal(500.0, imu_channel_layout(), data),
                          out_dir / mi.imu_file);
        }

        collection.measurements.push_back(std::move(mi));
        ++meas_counter;
      }
      index.collections.push_back(std::move(collection));
    }
  }
  save_manifest(index, out_dir / "manifest.json");
  return index;
}

}  // namespace grf
