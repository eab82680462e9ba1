#include "grf/align.hpp"

#include <algorithm>
#include <cmath>

namespace grf {

namespace {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  const auto k = static_cast<std::size_t>(
      q * static_cast<double>(values.size() - 1) + 0.5);
  std::nth_element(values.begin(), values.begin() + k, values.end());
  return values[k];
}

Eigen::VectorXd circular_shift(const Eigen::VectorXd& x, int shift) {
  const auto n = static_cast<int>(x.size());
  Eigen::VectorXd out(n);
  for (int j = 0; j < n; ++j)
    out[j] = x[((j - shift) % n + n) % n];
  return out;
}

double correlation_at_shift(const Eigen::VectorXd& x, const Eigen::VectorXd& ref,
                            int shift) {
  const auto n = static_cast<int>(x.size());
  double acc = 0.0;
  for (int j = 0; j < n; ++j)
    acc += x[((j - shift) % n + n) % n] * ref[j];
  return acc;
}

}  // namespace

double detect_jump_reference(const SampledSignal& norm_signal,
                             double window_begin_s, double window_end_s) {
  const Eigen::VectorXd x = norm_signal.data().col(0);
  const double rate = norm_signal.rate();
  const double t0 = norm_signal.start_time();

  Eigen::Index lo = static_cast<Eigen::Index>(
      std::ceil((window_begin_s - t0) * rate));
  Eigen::Index hi = static_cast<Eigen::Index>(
      std::floor((window_end_s - t0) * rate));
  lo = std::max<Eigen::Index>(lo, 0);
  hi = std::min<Eigen::Index>(hi, x.size() - 1);
  if (hi - lo < 2)
    fail(ErrorCode::NoReferenceFound, "jump search window holds fewer than 3 samples");

  Eigen::Index best = lo;
  double best_diff = -1.0;
  std::vector<double> abs_diffs;
  abs_diffs.reserve(static_cast<std::size_t>(hi - lo));
  for (Eigen::Index i = lo; i < hi; ++i) {
    const double d = x[i + 1] - x[i];
    abs_diffs.push_back(std::abs(d));
    if (d > best_diff) {
      best_diff = d;
      best = i;
    }
  }

  // The landing edge must stand well clear of the window's ordinary motion.
  const double floor_level = percentile(abs_diffs, 0.90);
  if (best_diff <= 0.0 || best_diff < 6.0 * floor_level)
    fail(ErrorCode::NoReferenceFound,
         "no landing edge with sufficient prominence in window");

  // Report the sample at which the rise completes.
  return norm_signal.time_at(best + 1);
}

LinearWarp estimate_linear_warp(std::pair<double, double> ref_start,
                                std::pair<double, double> ref_end) {
  const auto [imu_a, grf_a] = ref_start;
  const auto [imu_b, grf_b] = ref_end;
  if (!(imu_b > imu_a))
    fail(ErrorCode::DegenerateAnchor,
         "IMU anchor times must be strictly increasing");
  LinearWarp warp;
  warp.scale = (grf_b - grf_a) / (imu_b - imu_a);
  warp.offset = grf_a - warp.scale * imu_a;
  if (warp.scale < 0.99 || warp.scale > 1.01)
    fail(ErrorCode::ImplausibleDrift,
         "estimated clock scale " + std::to_string(warp.scale) +
             " outside [0.99, 1.01]");
  return warp;
}

SampledSignal apply_warp(const SampledSignal& signal, const LinearWarp& warp) {
  const Eigen::Index n = signal.sample_count();
  const double rate = signal.rate();
  const double t0 = signal.start_time();
  const double t_last = signal.time_at(n - 1);

  // Output grid = input grid, values looked up at the inverse-warped time.
  const double first_src = warp.grf_to_imu(t0);
  const double last_src = warp.grf_to_imu(t_last);
  if (last_src < t0 || first_src > t_last)
    fail(ErrorCode::EmptyOverlap, "warp maps the signal outside its own span");

  Eigen::MatrixXd out(n, signal.channel_count());
  const auto& d = signal.data();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t_src = warp.grf_to_imu(t0 + static_cast<double>(i) / rate);
    double pos = (t_src - t0) * rate;
    if (pos <= 0.0) {
      out.row(i) = d.row(0);
    } else if (pos >= static_cast<double>(n - 1)) {
      out.row(i) = d.row(n - 1);
    } else {
      const auto k = static_cast<Eigen::Index>(std::floor(pos));
      const double frac = pos - static_cast<double>(k);
      out.row(i) = (1.0 - frac) * d.row(k) + frac * d.row(k + 1);
    }
  }
  return SampledSignal(rate, signal.channels(), std::move(out), t0);
}

Eigen::VectorXd step_template() {
  Eigen::VectorXd tmpl = Eigen::VectorXd::Zero(Step::kSamples);
  for (int j = 0; j < 50; ++j) tmpl[j] = static_cast<double>(j) / 50.0;
  for (int j = 50; j < 100; ++j) tmpl[j] = static_cast<double>(100 - j) / 50.0;
  return tmpl;
}

StepBoundaries segment_steps(const SampledSignal& shank_accel_norm) {
  const Eigen::Index n = shank_accel_norm.sample_count();
  const Eigen::Index t_len = Step::kSamples;
  if (std::abs(shank_accel_norm.rate() - Step::kRateHz) > 0.5)
    fail(ErrorCode::RateMismatch, "segmentation expects a 500 Hz signal");
  if (n < t_len)
    fail(ErrorCode::InsufficientSamples,
         "segmentation needs at least 400 ms of signal");
  const bool two_sided = shank_accel_norm.channel_count() >= 2;
  Eigen::VectorXd detect = shank_accel_norm.data().col(0);
  if (two_sided) detect += shank_accel_norm.data().col(1);

  // Offsets and gains vary by athlete; remove the median so the adaptive
  // threshold sees only the strike transients.
  std::vector<double> sorted(detect.data(), detect.data() + detect.size());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  detect.array() -= sorted[sorted.size() / 2];

  const Eigen::VectorXd tmpl = step_template();
  const Eigen::Index m = n - t_len + 1;
  Eigen::VectorXd corr(m);
  for (Eigen::Index i = 0; i < m; ++i)
    corr[i] = detect.segment(i, t_len).dot(tmpl);

  std::vector<double> corr_values(corr.data(), corr.data() + corr.size());
  const double threshold = 0.5 * percentile(corr_values, 0.90);

  const auto min_gap = static_cast<Eigen::Index>(0.100 * Step::kRateHz);
  std::vector<Eigen::Index> starts;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (corr[i] <= threshold) continue;
    if (i > 0 && corr[i - 1] >= corr[i]) continue;
    if (i + 1 < m && corr[i + 1] > corr[i]) continue;
    if (!starts.empty() && i - starts.back() < min_gap) {
      if (corr[i] > corr[starts.back()]) starts.back() = i;
      continue;
    }
    starts.push_back(i);
  }
  if (starts.empty())
    fail(ErrorCode::NoStepsFound, "no correlation maxima above threshold");

  // Side of the first boundary anchors to the shank with the larger local
  // peak; sides strictly alternate from there.
  Side first = Side::Left;
  if (two_sided) {
    const Eigen::Index i0 = starts.front();
    const Eigen::Index span = std::min<Eigen::Index>(t_len / 2, n - i0);
    const double left_peak =
        shank_accel_norm.data().col(0).segment(i0, span).maxCoeff();
    const double right_peak =
        shank_accel_norm.data().col(1).segment(i0, span).maxCoeff();
    first = left_peak >= right_peak ? Side::Left : Side::Right;
  }

  StepBoundaries boundaries;
  boundaries.reserve(starts.size());
  for (std::size_t idx = 0; idx < starts.size(); ++idx) {
    const Side side =
        (idx % 2 == 0) == (first == Side::Left) ? Side::Left : Side::Right;
    boundaries.push_back({starts[idx], side});
  }
  return boundaries;
}

AlignedSteps align_steps(std::vector<Step> steps, const std::string& driver) {
  AlignedSteps result;
  if (steps.empty()) {
    return result;
  }
  constexpr int kMaxShift = 20;
  const Eigen::Index t_len = Step::kSamples;

  std::vector<int> shifts(steps.size(), 0);
  Eigen::VectorXd mean = steps.front().channel(driver);
  double count = 1.0;
  for (std::size_t i = 1; i < steps.size(); ++i) {
    const Eigen::VectorXd x = steps[i].channel(driver);
    int best_shift = 0;
    double best = correlation_at_shift(x, mean, 0);
    for (int s = -kMaxShift; s <= kMaxShift; ++s) {
      if (s == 0) continue;
      const double c = correlation_at_shift(x, mean, s);
      if (c > best ||
          (c == best && (std::abs(s) < std::abs(best_shift) ||
                         (std::abs(s) == std::abs(best_shift) && s < best_shift)))) {
        best = c;
        best_shift = s;
      }
    }
    shifts[i] = best_shift;
    mean = (mean * count + circular_shift(x, best_shift)) / (count + 1.0);
    count += 1.0;
  }

  // One common delay aligns the measurement with steps of other
  // measurements via the stride reference.
  const Eigen::VectorXd tmpl = step_template();
  int best_delay = 0;
  double best = correlation_at_shift(mean, tmpl, 0);
  for (int d = 1; d < t_len; ++d) {
    const double c = correlation_at_shift(mean, tmpl, d);
    if (c > best) {
      best = c;
      best_delay = d;
    }
  }
  // Report the delay in [-100, 100) so small backward shifts read naturally.
  if (best_delay >= t_len / 2) best_delay -= t_len;

  result.global_delay = best_delay;
  result.steps = std::move(steps);
  result.shifts.resize(result.steps.size());
  for (std::size_t i = 0; i < result.steps.size(); ++i) {
    const int total = shifts[i] + best_delay;
    result.shifts[i] = total;
    Step& step = result.steps[i];
    Eigen::MatrixXd shifted(step.data.rows(), step.data.cols());
    for (Eigen::Index c = 0; c < step.data.cols(); ++c)
      shifted.col(c) = circular_shift(step.data.col(c), total);
    step.data = std::move(shifted);
  }
  return result;
}

}  // namespace grf
