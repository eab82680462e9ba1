#include "grf/filter.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace grf {

namespace {

// Analog Butterworth prototype poles scaled to cutoff omega, paired into
// digital biquads via the bilinear transform. Each section is normalized to
// unit DC gain.
std::vector<Biquad> design_sections(int order, double cutoff_hz, double rate_hz) {
  const double omega = 2.0 * rate_hz *
                       std::tan(std::numbers::pi * cutoff_hz / rate_hz);
  const double k = 2.0 * rate_hz;

  std::vector<Biquad> sections;
  // One biquad per upper-half-plane pole; its conjugate is implied.
  for (int i = 1; i <= order / 2; ++i) {
    const double phi =
        std::numbers::pi * (2.0 * i + order - 1.0) / (2.0 * order);
    const std::complex<double> s = omega * std::complex<double>(std::cos(phi),
                                                                std::sin(phi));
    const std::complex<double> p = (k + s) / (k - s);
    Biquad q{};
    q.a1 = -2.0 * p.real();
    q.a2 = std::norm(p);
    const double g = (1.0 + q.a1 + q.a2) / 4.0;  // unit gain at z = 1
    q.b0 = g;
    q.b1 = 2.0 * g;
    q.b2 = g;
    sections.push_back(q);
  }
  if (order % 2 == 1) {
    // real pole at s = -omega
    const double p = (k - omega) / (k + omega);
    Biquad q{};
    q.a1 = -p;
    q.a2 = 0.0;
    const double g = (1.0 + q.a1) / 2.0;
    q.b0 = g;
    q.b1 = g;
    q.b2 = 0.0;
    sections.push_back(q);
  }
  return sections;
}

}  // namespace

ButterworthLowpass::ButterworthLowpass(int order, double cutoff_hz,
                                       double rate_hz)
    : order_(order) {
  if (order < 1 || order > 12)
    fail(ErrorCode::InvalidArgument, "filter order must be in [1, 12]");
  if (!(cutoff_hz > 0.0) || cutoff_hz >= rate_hz / 2.0)
    fail(ErrorCode::InvalidCutoff,
         "cutoff must satisfy 0 < cutoff < rate/2 (cutoff=" +
             std::to_string(cutoff_hz) + " Hz, rate=" + std::to_string(rate_hz) +
             " Hz)");
  sections_ = design_sections(order, cutoff_hz, rate_hz);

  // Steady state of the transposed direct form II registers under a unit
  // step whose output has settled to the section's DC gain.
  step_state_.reserve(sections_.size());
  for (const Biquad& q : sections_) {
    const double h1 = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    const double s2 = q.b2 - q.a2 * h1;
    const double s1 = q.b1 - q.a1 * h1 + s2;
    step_state_.push_back({s1, s2});
  }
}

Eigen::VectorXd ButterworthLowpass::filter_forward(const Eigen::VectorXd& x) const {
  Eigen::VectorXd y = x;
  for (std::size_t si = 0; si < sections_.size(); ++si) {
    const Biquad& q = sections_[si];
    const double x0 = y.size() > 0 ? y[0] : 0.0;
    double s1 = step_state_[si][0] * x0;
    double s2 = step_state_[si][1] * x0;
    for (Eigen::Index n = 0; n < y.size(); ++n) {
      const double xn = y[n];
      const double yn = q.b0 * xn + s1;
      s1 = q.b1 * xn - q.a1 * yn + s2;
      s2 = q.b2 * xn - q.a2 * yn;
      y[n] = yn;
    }
  }
  return y;
}

Eigen::VectorXd ButterworthLowpass::filtfilt(const Eigen::VectorXd& x) const {
  const Eigen::Index n = x.size();
  const Eigen::Index pad = pad_length();
  if (n <= pad)
    fail(ErrorCode::InsufficientSamples,
         "signal too short for zero-phase filtering: " + std::to_string(n) +
             " samples, need > " + std::to_string(pad));

  Eigen::VectorXd ext(n + 2 * pad);
  for (Eigen::Index j = 0; j < pad; ++j)
    ext[j] = 2.0 * x[0] - x[pad - j];
  ext.segment(pad, n) = x;
  for (Eigen::Index j = 0; j < pad; ++j)
    ext[pad + n + j] = 2.0 * x[n - 1] - x[n - 2 - j];

  // Both pass orders (forward-backward and backward-forward) are averaged:
  // the edge transients of the two orders mirror each other, so filtering
  // commutes with time reversal exactly.
  const Eigen::VectorXd fwd_first =
      filter_forward(Eigen::VectorXd(filter_forward(ext).reverse())).reverse();
  const Eigen::VectorXd bwd_first =
      filter_forward(Eigen::VectorXd(filter_forward(ext.reverse()).reverse()));
  return ((fwd_first + bwd_first) / 2.0).segment(pad, n);
}

SampledSignal butterworth_lowpass(const SampledSignal& signal, double cutoff_hz,
                                  int order) {
  ButterworthLowpass filter(order, cutoff_hz, signal.rate());
  if (signal.sample_count() <= 6 * order)
    fail(ErrorCode::InsufficientSamples,
         "signal length must exceed 6*order samples for edge padding");
  Eigen::MatrixXd out(signal.sample_count(), signal.channel_count());
  for (Eigen::Index c = 0; c < signal.channel_count(); ++c)
    out.col(c) = filter.filtfilt(signal.data().col(c));
  return SampledSignal(signal.rate(), signal.channels(), std::move(out),
                       signal.start_time());
}

SampledSignal downsample(const SampledSignal& signal, int factor,
                         bool anti_alias) {
  if (factor < 1)
    fail(ErrorCode::InvalidArgument, "downsample factor must be >= 1");
  if (factor == 1) return signal;

  const double out_rate = signal.rate() / factor;
  const SampledSignal* src = &signal;
  SampledSignal filtered = signal;
  if (anti_alias) {
    filtered = butterworth_lowpass(signal, 0.8 * (out_rate / 2.0), 4);
    src = &filtered;
  }
  const Eigen::Index out_n = (src->sample_count() + factor - 1) / factor;
  Eigen::MatrixXd out(out_n, src->channel_count());
  for (Eigen::Index i = 0; i < out_n; ++i)
    out.row(i) = src->data().row(i * factor);
  return SampledSignal(out_rate, src->channels(), std::move(out),
                       src->start_time());
}

}  // namespace grf
