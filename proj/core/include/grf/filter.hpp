#pragma once

#include <Eigen/Dense>
#include <vector>

#include "grf/signal.hpp"

namespace grf {

/// One second-order section in direct form II transposed.
struct Biquad {
  double b0, b1, b2;  // numerator
  double a1, a2;      // denominator (a0 = 1)
};

/// Cascade of biquads realizing a digital Butterworth low-pass, designed by
/// bilinear transform with frequency prewarping so the -3 dB point lands at
/// the requested cutoff per pass.
class ButterworthLowpass {
 public:
  ButterworthLowpass(int order, double cutoff_hz, double rate_hz);

  int order() const { return order_; }
  const std::vector<Biquad>& sections() const { return sections_; }

  /// Single forward pass with step-response initial conditions scaled by the
  /// first sample (keeps constants constant from sample zero).
  Eigen::VectorXd filter_forward(const Eigen::VectorXd& x) const;

  /// Zero-phase pass: odd-reflection padding of 3*(order+1) samples at each
  /// end, forward filter, backward filter, unpad.
  Eigen::VectorXd filtfilt(const Eigen::VectorXd& x) const;

  Eigen::Index pad_length() const { return 3 * (order_ + 1); }

 private:
  int order_;
  std::vector<Biquad> sections_;
  std::vector<std::array<double, 2>> step_state_;  // unit-step steady state per section
};

/// Zero-phase low-pass over every channel. Preconditions: 0 < cutoff <
/// Nyquist (else invalid-cutoff) and length > 6*order (else
/// insufficient-samples).
SampledSignal butterworth_lowpass(const SampledSignal& signal, double cutoff_hz,
                                  int order = 4);

/// Keeps every factor-th sample after an internal anti-alias low-pass at
/// 0.8x the output Nyquist. `anti_alias=false` bypasses the filter for
/// exact-decimation tests.
SampledSignal downsample(const SampledSignal& signal, int factor,
                         bool anti_alias = true);

}  // namespace grf
