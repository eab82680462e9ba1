#include <doctest.h>

#include <functional>

#include "grf/biomech.hpp"
#include "grf/filter.hpp"
#include "test_helpers.hpp"

using namespace grf;
using namespace grf::testing;

namespace {

constexpr double kRate = 500.0;
constexpr double kBw = 700.0;  // Newtons
const double kThresholdBw = 50.0 / kBw;

/// Continuous half-sine stance: peak 2 BW over 0.25 s starting at t = 0.
double half_sine(double t) {
  if (t < 0.0 || t > 0.25) return 0.0;
  return 2.0 * std::sin(std::numbers::pi * t / 0.25);
}

Eigen::VectorXd sample_window(const std::function<double(double)>& f,
                              Eigen::Index n = Step::kSamples,
                              double rate = kRate) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = f(static_cast<double>(i) / rate);
  return x;
}

/// Bisection on a monotone bracket of f(t) = threshold.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double threshold) {
  for (int it = 0; it < 200; ++it) {
    const double mid = (lo + hi) / 2.0;
    const bool rising = f(hi) > f(lo);
    if ((f(mid) > threshold) == rising)
      hi = mid;
    else
      lo = mid;
  }
  return (lo + hi) / 2.0;
}

double dense_integral(const std::function<double(double)>& f, double t0,
                      double t1, int cells = 400000) {
  double acc = 0.0;
  const double h = (t1 - t0) / cells;
  for (int i = 0; i < cells; ++i) {
    const double a = t0 + i * h;
    acc += (f(a) + f(a + h)) * h / 2.0;
  }
  return acc;
}

double dense_max(const std::function<double(double)>& f, double t0, double t1,
                 int cells = 400000) {
  double best = f(t0);
  const double h = (t1 - t0) / cells;
  for (int i = 1; i <= cells; ++i) best = std::max(best, f(t0 + i * h));
  return best;
}

}  // namespace

TEST_CASE("stance events on the half-sine stance") {
  const Eigen::VectorXd gz = sample_window(half_sine);
  const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
  const StanceEvents ev = stance_events(gz, gy, kRate, kBw);

  const double ts = bisect(half_sine, 0.0, 0.125, kThresholdBw);
  const double te = bisect(half_sine, 0.125, 0.25, kThresholdBw);
  CHECK(ts == doctest::Approx(0.00284).epsilon(0.01));
  CHECK(ev.start_s == doctest::Approx(ts).epsilon(0.001));
  CHECK(ev.end_s == doctest::Approx(te).epsilon(0.001));
  CHECK(ev.contact_s == doctest::Approx(te - ts).epsilon(0.001));
}

TEST_CASE("stance error paths") {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(Step::kSamples);
  CHECK_THROWS_WITH_AS(stance_events(zero, zero, kRate, kBw),
                       doctest::Contains("no-stance"), Error);
  const Eigen::VectorXd high = Eigen::VectorXd::Constant(Step::kSamples, 1.0);
  CHECK_THROWS_WITH_AS(stance_events(high, zero, kRate, kBw),
                       doctest::Contains("truncated-stance"), Error);
}

TEST_CASE("braking time of a half-negative profile") {
  // g_y negative on exactly the first half of the stance
  const Eigen::VectorXd gz = sample_window(half_sine);
  auto gy_fn = [](double t) {
    if (t < 0.0 || t > 0.25) return 0.0;
    return t < 0.125 ? -0.2 : 0.2;
  };
  const Eigen::VectorXd gy = sample_window(gy_fn);
  const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
  CHECK(std::abs(ev.braking_s - ev.contact_s / 2.0) <= 1.0 / kRate);
  CHECK(ev.braking_s >= 0.0);
  CHECK(ev.braking_s <= ev.contact_s);
}

TEST_CASE("loading rate") {
  SUBCASE("linear ramp has its slope") {
    auto ramp = [](double t) { return t < 0.35 ? 4.0 * t : 0.0; };
    const Eigen::VectorXd gz = sample_window(ramp);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    CHECK(loading_rate(gz, kRate, ev) == doctest::Approx(4.0).epsilon(1e-6));
  }
  SUBCASE("constant plateau has zero slope") {
    auto plateau = [](double t) { return t < 0.3 ? 1.0 : 0.0; };
    const Eigen::VectorXd gz = sample_window(plateau);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    CHECK(loading_rate(gz, kRate, ev) == doctest::Approx(0.0).epsilon(1e-9));
  }
  SUBCASE("half-sine matches the closed form within half a percent") {
    const Eigen::VectorXd gz = sample_window(half_sine);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    const double expected =
        (half_sine(ev.start_s + 0.025) - half_sine(ev.start_s)) / 0.025;
    CHECK(loading_rate(gz, kRate, ev) ==
          doctest::Approx(expected).epsilon(0.005));
  }
  SUBCASE("stance shorter than the window") {
    auto blip = [](double t) { return t < 0.02 ? 1.0 : 0.0; };
    const Eigen::VectorXd gz = sample_window(blip);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    CHECK_THROWS_WITH_AS(loading_rate(gz, kRate, ev),
                         doctest::Contains("stance-too-short"), Error);
  }
}

TEST_CASE("active peak") {
  SUBCASE("half-sine peak is inside the window") {
    const Eigen::VectorXd gz = sample_window(half_sine);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    CHECK(active_peak(gz, kRate, ev) == doctest::Approx(2.0).epsilon(1e-4));
  }
  SUBCASE("an early impact spike is excluded") {
    auto composite = [](double t) {
      if (t < 0.0 || t > 0.25) return 0.0;
      const double u = t / 0.25;
      const double spike = 3.0 * std::exp(-0.5 * std::pow((u - 0.05) / 0.02, 2));
      const double active = 2.0 * std::exp(-0.5 * std::pow((u - 0.45) / 0.18, 2));
      return std::max(spike, active);
    };
    const Eigen::VectorXd gz = sample_window(composite);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    CHECK(active_peak(gz, kRate, ev) == doctest::Approx(2.0).epsilon(0.01));
  }
  SUBCASE("monotone decreasing profile peaks at 30% of stance") {
    auto falling = [](double t) {
      return (t >= 0.0 && t < 0.3) ? 2.0 - 5.0 * t : 0.0;
    };
    const Eigen::VectorXd gz = sample_window(falling);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    const double t30 = ev.start_s + 0.3 * ev.contact_s;
    const double oracle = dense_max(falling, t30, ev.end_s);
    CHECK(active_peak(gz, kRate, ev) == doctest::Approx(oracle).epsilon(0.005));
  }
}

TEST_CASE("vertical aggregates") {
  SUBCASE("unit plateau over a one-second stance (literal formula)") {
    // 1.2 s window at 500 Hz; vertical GRF is 1 BW for exactly 1.0 s
    auto plateau = [](double t) { return (t >= 0.0 && t < 1.0) ? 1.0 : 0.0; };
    const Eigen::VectorXd gz = sample_window(plateau, 600);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(600);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    const VerticalAggregates agg = vertical_aggregates(gz, kRate, ev);
    CHECK(agg.average_bw == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(agg.net_impulse_bw_s == doctest::Approx(0.0).epsilon(5e-3));
  }
  SUBCASE("two-BW plateau over half a second") {
    auto plateau = [](double t) { return (t >= 0.0 && t < 0.5) ? 2.0 : 0.0; };
    const Eigen::VectorXd gz = sample_window(plateau, 400);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(400);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    const VerticalAggregates agg = vertical_aggregates(gz, kRate, ev);
    CHECK(agg.average_bw == doctest::Approx(2.0).epsilon(5e-3));
    CHECK(agg.net_impulse_bw_s == doctest::Approx(0.0).epsilon(5e-3));
    const VerticalAggregates alt =
        vertical_aggregates(gz, kRate, ev, NetImpulseMode::IntegralOfExcess);
    CHECK(alt.net_impulse_bw_s ==
          doctest::Approx(1.0 - ev.contact_s).epsilon(5e-3));
  }
  SUBCASE("half-sine integral matches dense quadrature") {
    const Eigen::VectorXd gz = sample_window(half_sine);
    const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    const double oracle = dense_integral(half_sine, ev.start_s, ev.end_s);
    const VerticalAggregates agg = vertical_aggregates(gz, kRate, ev);
    CHECK(agg.average_bw * ev.contact_s ==
          doctest::Approx(oracle).epsilon(0.002));
  }
}

TEST_CASE("a/p velocity change") {
  SUBCASE("constant braking force") {
    // g_y = -0.1 BW while the stance lasts 0.2 s: 9.81 * -0.1 * 0.2
    auto gz_fn = [](double t) { return (t >= 0.0 && t < 0.2) ? 1.0 : 0.0; };
    auto gy_fn = [](double t) { return (t >= 0.0 && t < 0.2) ? -0.1 : 0.0; };
    const Eigen::VectorXd gz = sample_window(gz_fn);
    const Eigen::VectorXd gy = sample_window(gy_fn);
    const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
    CHECK(ap_velocity_change(gy, kRate, ev) ==
          doctest::Approx(-0.1962).epsilon(0.01));
  }
  SUBCASE("zero and antisymmetric profiles integrate to zero") {
    const Eigen::VectorXd gz = sample_window(half_sine);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(Step::kSamples);
    const StanceEvents ev0 = stance_events(gz, zero, kRate, kBw);
    CHECK(ap_velocity_change(zero, kRate, ev0) == doctest::Approx(0.0));

    auto anti = [](double t) {
      if (t < 0.0 || t > 0.25) return 0.0;
      return -0.25 * std::sin(2.0 * std::numbers::pi * t / 0.25);
    };
    const Eigen::VectorXd gy = sample_window(anti);
    // symmetric stance bounds around mid-stance make the integral vanish
    StanceEvents ev = ev0;
    const double mid = 0.125;
    const double half = std::min(mid - ev0.start_s, ev0.end_s - mid);
    ev.start_s = mid - half;
    ev.end_s = mid + half;
    ev.contact_s = 2.0 * half;
    CHECK(std::abs(ap_velocity_change(gy, kRate, ev)) < 1e-6);
  }
}

TEST_CASE("compute_all composes the individual operations") {
  Step step = make_step(
      [](const std::string& c, Eigen::Index i) {
        const double t = static_cast<double>(i) / kRate;
        if (c == chan::kGrfZ) return half_sine(t + 1.0 / kRate * 0) ;
        if (c == chan::kGrfY)
          return (t >= 0.0 && t <= 0.25)
                     ? -0.2 * std::sin(2.0 * std::numbers::pi * t / 0.25)
                     : 0.0;
        return 0.0;
      },
      Side::Left, kBw, {chan::kGrfX, chan::kGrfY, chan::kGrfZ});

  const BiomechReport report = compute_all(step, kBw);

  // recompute by composing the ops on the same 50 Hz-filtered data
  const ButterworthLowpass filter(4, 50.0, kRate);
  const Eigen::VectorXd gz = filter.filtfilt(step.channel(chan::kGrfZ));
  const Eigen::VectorXd gy = filter.filtfilt(step.channel(chan::kGrfY));
  const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
  CHECK(report.contact_time_s == doctest::Approx(ev.contact_s));
  CHECK(report.braking_time_s == doctest::Approx(ev.braking_s));
  CHECK(report.braking_fraction ==
        doctest::Approx(ev.braking_s / ev.contact_s));
  CHECK(report.loading_rate_bw_per_s ==
        doctest::Approx(loading_rate(gz, kRate, ev)));
  CHECK(report.active_peak_bw == doctest::Approx(active_peak(gz, kRate, ev)));
  const VerticalAggregates agg = vertical_aggregates(gz, kRate, ev);
  CHECK(report.average_vertical_force_bw == doctest::Approx(agg.average_bw));
  CHECK(report.net_vertical_impulse_bw_s ==
        doctest::Approx(agg.net_impulse_bw_s));
  CHECK(report.ap_velocity_change_m_per_s ==
        doctest::Approx(ap_velocity_change(gy, kRate, ev)));

  // errors carry the variable name
  Step flat = make_step([](const std::string&, Eigen::Index) { return 0.0; },
                        Side::Left, kBw, {chan::kGrfX, chan::kGrfY, chan::kGrfZ});
  CHECK_THROWS_WITH_AS(compute_all(flat, kBw),
                       doctest::Contains("stance_events"), Error);
}

TEST_CASE("time-shift invariance of all variables") {
  // Variables are defined relative to the stance start: shifting the
  // 50 Hz-filtered samples by whole samples changes nothing exactly.
  const ButterworthLowpass filter(4, 50.0, kRate);
  auto gy_fn = [](double t) {
    if (t < 0.0 || t > 0.25) return 0.0;
    return -0.2 * (std::sin(2.0 * std::numbers::pi * t / 0.25) +
                   0.25 * std::sin(std::numbers::pi * t / 0.25));
  };
  const Eigen::VectorXd gz0 = filter.filtfilt(sample_window(half_sine, 320));
  const Eigen::VectorXd gy0 = filter.filtfilt(sample_window(gy_fn, 320));

  auto shifted = [](const Eigen::VectorXd& x, Eigen::Index by) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
    out.tail(x.size() - by) = x.head(x.size() - by);
    return out;
  };
  const StanceEvents a = stance_events(gz0, gy0, kRate, kBw);
  const Eigen::VectorXd gzs = shifted(gz0, 40);
  const Eigen::VectorXd gys = shifted(gy0, 40);
  const StanceEvents b = stance_events(gzs, gys, kRate, kBw);

  CHECK(b.start_s - a.start_s == doctest::Approx(40.0 / kRate).epsilon(1e-12));
  // equality up to floating-point rounding of the shifted time products
  CHECK(b.contact_s == doctest::Approx(a.contact_s).epsilon(1e-12));
  CHECK(b.braking_s == doctest::Approx(a.braking_s).epsilon(1e-12));
  CHECK(loading_rate(gzs, kRate, b) ==
        doctest::Approx(loading_rate(gz0, kRate, a)).epsilon(1e-12));
  CHECK(active_peak(gzs, kRate, b) ==
        doctest::Approx(active_peak(gz0, kRate, a)).epsilon(1e-12));
  const VerticalAggregates agg_a = vertical_aggregates(gz0, kRate, a);
  const VerticalAggregates agg_b = vertical_aggregates(gzs, kRate, b);
  CHECK(agg_b.average_bw == doctest::Approx(agg_a.average_bw).epsilon(1e-12));
  CHECK(agg_b.net_impulse_bw_s ==
        doctest::Approx(agg_a.net_impulse_bw_s).epsilon(1e-12));
  CHECK(ap_velocity_change(gys, kRate, b) ==
        doctest::Approx(ap_velocity_change(gy0, kRate, a)).epsilon(1e-12));
}

TEST_CASE("scaling law for the vertical variables") {
  const Eigen::VectorXd gz = sample_window(half_sine);
  const Eigen::VectorXd gy = Eigen::VectorXd::Zero(Step::kSamples);
  const StanceEvents ev = stance_events(gz, gy, kRate, kBw);
  const double c = 1.7;
  const Eigen::VectorXd scaled = c * gz;

  CHECK(active_peak(scaled, kRate, ev) == c * active_peak(gz, kRate, ev));
  const VerticalAggregates base = vertical_aggregates(gz, kRate, ev);
  const VerticalAggregates big = vertical_aggregates(scaled, kRate, ev);
  CHECK(big.average_bw == doctest::Approx(c * base.average_bw).epsilon(1e-12));
  CHECK(big.net_impulse_bw_s ==
        doctest::Approx(c * (base.net_impulse_bw_s + 1.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("braking measure agrees with a dense grid") {
  auto gy_fn = [](double t) {
    if (t < 0.0 || t > 0.25) return 0.0;
    return -0.2 * (std::sin(2.0 * std::numbers::pi * t / 0.25) +
                   0.25 * std::sin(std::numbers::pi * t / 0.25));
  };
  const Eigen::VectorXd gz = sample_window(half_sine);
  const Eigen::VectorXd gy = sample_window(gy_fn);
  const StanceEvents ev = stance_events(gz, gy, kRate, kBw);

  double dense = 0.0;
  const int cells = 200000;
  const double h = (ev.end_s - ev.start_s) / cells;
  for (int i = 0; i < cells; ++i)
    if (gy_fn(ev.start_s + (i + 0.5) * h) < 0.0) dense += h;
  CHECK(std::abs(ev.braking_s - dense) <= 1.0 / kRate);
}
