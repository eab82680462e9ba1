#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "grf/rng.hpp"
#include "grf/signal.hpp"

namespace grf::testing {

/// Amplitude of one tone in a uniformly sampled signal, by projection onto
/// the complex exponential. Assumes an integral number of periods.
inline double tone_amplitude(const Eigen::VectorXd& x, double freq_hz,
                             double rate_hz) {
  std::complex<double> acc(0.0, 0.0);
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double phase =
        -2.0 * std::numbers::pi * freq_hz * static_cast<double>(n) / rate_hz;
    acc += x[n] * std::complex<double>(std::cos(phase), std::sin(phase));
  }
  return 2.0 * std::abs(acc) / static_cast<double>(x.size());
}

inline Eigen::VectorXd sine_wave(double freq_hz, double rate_hz,
                                 Eigen::Index n, double amplitude = 1.0) {
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i)
    x[i] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz *
                                static_cast<double>(i) / rate_hz);
  return x;
}

inline SampledSignal single_channel(Eigen::VectorXd x, double rate_hz,
                                    const std::string& label = "x",
                                    double start = 0.0) {
  Eigen::MatrixXd data(x.size(), 1);
  data.col(0) = x;
  return SampledSignal(rate_hz, {label}, std::move(data), start);
}

/// A step whose channels are filled from per-channel generator functions
/// of the sample index; channels default to the standard layout.
inline Step make_step(
    const std::function<double(const std::string&, Eigen::Index)>& fill,
    Side side = Side::Left, double body_weight = 700.0,
    std::vector<std::string> channels = step_channel_layout()) {
  Eigen::MatrixXd data(Step::kSamples, static_cast<Eigen::Index>(channels.size()));
  for (std::size_t c = 0; c < channels.size(); ++c)
    for (Eigen::Index i = 0; i < Step::kSamples; ++i)
      data(i, static_cast<Eigen::Index>(c)) = fill(channels[c], i);
  return Step::make(std::move(channels), std::move(data), side, body_weight);
}

inline Step random_step(Rng& rng, Side side = Side::Left,
                        double body_weight = 700.0) {
  return make_step([&rng](const std::string&, Eigen::Index) {
    return rng.uniform(-1.0, 1.0);
  }, side, body_weight);
}

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows,
                                     Eigen::Index cols, double lo = -1.0,
                                     double hi = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = rng.uniform(lo, hi);
  return m;
}

inline Eigen::VectorXd random_vector(Rng& rng, Eigen::Index n, double lo = -1.0,
                                     double hi = 1.0) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.uniform(lo, hi);
  return v;
}

}  // namespace grf::testing
