#pragma once

#include <string>
#include <vector>

#include "grf/signal.hpp"

namespace grf {

/// Stance boundaries of one step from the 50 N threshold on the vertical
/// GRF, with crossings located by linear interpolation between samples.
/// Times are seconds from the start of the step window.
struct StanceEvents {
  double start_s = 0.0;    // vertical GRF first exceeds 50 N
  double end_s = 0.0;      // first drop below 50 N after start
  double contact_s = 0.0;  // end - start
  double braking_s = 0.0;  // measure of {t in stance : g_y(t) < 0}
};

/// How the net vertical impulse subtracts the body-weight unit: the printed
/// formula (integral - 1) or the dimensionally conventional
/// integral of (g_z - 1) over the stance.
enum class NetImpulseMode { LiteralMinusOne, IntegralOfExcess };

std::string to_string(NetImpulseMode m);
NetImpulseMode net_impulse_mode_from_string(const std::string& name);

/// The eight discrete variables of one step, units in the field names.
struct BiomechReport {
  double loading_rate_bw_per_s = 0.0;
  double contact_time_s = 0.0;
  double braking_time_s = 0.0;
  double braking_fraction = 0.0;
  double active_peak_bw = 0.0;
  double average_vertical_force_bw = 0.0;
  double net_vertical_impulse_bw_s = 0.0;
  double ap_velocity_change_m_per_s = 0.0;
};

/// Names of the report fields in a fixed order, for tables and MAPE keys.
const std::vector<std::string>& biomech_variable_names();
double biomech_variable(const BiomechReport& report, const std::string& name);

// The variable definitions work on any uniformly sampled GRF window; the
// vector forms are the core, the Step forms read the grf_* channels.

/// Locates the stance. Expects the 50 Hz low-pass already applied
/// (compute_all applies it). Throws no-stance when the vertical GRF never
/// exceeds 50 N and truncated-stance when it never drops back below.
StanceEvents stance_events(const Eigen::VectorXd& gz_bw,
                           const Eigen::VectorXd& gy_bw, double rate_hz,
                           double body_weight_newtons);
StanceEvents stance_events(const Step& grf_step, double body_weight_newtons);

/// Average slope of the vertical GRF over the first 25 ms of the stance,
/// values interpolated at both instants. Throws stance-too-short when the
/// stance ends within 25 ms.
double loading_rate(const Eigen::VectorXd& gz_bw, double rate_hz,
                    const StanceEvents& events);
double loading_rate(const Step& grf_step, const StanceEvents& events);

/// Maximum vertical GRF between 30% and 100% of the stance.
double active_peak(const Eigen::VectorXd& gz_bw, double rate_hz,
                   const StanceEvents& events);
double active_peak(const Step& grf_step, const StanceEvents& events);

struct VerticalAggregates {
  double average_bw = 0.0;
  double net_impulse_bw_s = 0.0;
};

/// Trapezoidal integral of the vertical GRF over the stance with
/// interpolated endpoint values; average = integral / contact time.
VerticalAggregates vertical_aggregates(
    const Eigen::VectorXd& gz_bw, double rate_hz, const StanceEvents& events,
    NetImpulseMode mode = NetImpulseMode::LiteralMinusOne);
VerticalAggregates vertical_aggregates(
    const Step& grf_step, const StanceEvents& events,
    NetImpulseMode mode = NetImpulseMode::LiteralMinusOne);

/// 9.81 times the trapezoidal integral of the A/P component over the stance.
double ap_velocity_change(const Eigen::VectorXd& gy_bw, double rate_hz,
                          const StanceEvents& events);
double ap_velocity_change(const Step& grf_step, const StanceEvents& events);

/// Applies the 4th-order zero-phase 50 Hz low-pass, then all variables
/// above. Stance errors propagate with the variable name attached.
BiomechReport compute_all(const Step& raw_grf_step, double body_weight_newtons,
                          NetImpulseMode mode = NetImpulseMode::LiteralMinusOne);

}  // namespace grf
