#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "grf/dataset.hpp"

namespace grf {

/// Parametric stance of one foot contact, in body-weight units over
/// tau in [0, contact_s]. The vertical component is an active half-sine
/// plus an impact transient scaled by the prominence; A/P is a braking/
/// propulsion full sine; M/L a small side-signed oscillation.
struct StanceShape {
  double contact_s = 0.24;
  double active_peak_bw = 2.5;
  double impact_prominence = 0.5;  // in [0, 1]
  double impact_frac = 0.16;       // impact peak location, fraction of stance
  double brake_amp_bw = 0.22;
  double ml_amp_bw = 0.05;
  double amp_factor = 1.0;  // per-step amplitude modulation
  int side_sign = 1;        // +1 left, -1 right
};

double stance_gz(const StanceShape& shape, double tau_s);
double stance_gy(const StanceShape& shape, double tau_s);
double stance_gx(const StanceShape& shape, double tau_s);

struct SynthConfig {
  std::uint64_t seed = 7;
  int athletes = 4;
  int collections_per_athlete = 2;
  std::vector<double> speeds_mps = {3.8, 4.9};
  int steps_per_measurement = 60;
  /// When positive, per-step amplitudes follow a fixed cyclic pattern of
  /// this period (anchored at each measurement's first step), visible in
  /// the GRF but not in the IMU channels.
  int style_period = 0;
  /// Scales every noise source; 1.0 is the calibrated default.
  double noise_scale = 1.0;
};

/// Writes a complete synthetic dataset (manifest + per-measurement CSV
/// files) under `out_dir` and returns its index. Byte-identical for equal
/// configurations. Per athlete, a latent style (impact prominence, cadence,
/// foot-strike pattern, per-sensor gains) drives both the GRF stances and
/// the IMU channels, so an IMU-to-GRF mapping exists by construction.
/// Every measurement embeds two jump references with a seeded linear clock
/// drift between the IMU and GRF streams.
DatasetIndex synth_generate(const SynthConfig& config,
                            const std::filesystem::path& out_dir);

}  // namespace grf
