#include <doctest.h>

#include <set>

#include "grf/align.hpp"
#include "test_helpers.hpp"

using namespace grf;
using namespace grf::testing;

namespace {

Eigen::VectorXd baseline_with_spike(Eigen::Index n, Eigen::Index spike_at,
                                    double spike, double base = 9.81) {
  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, base);
  for (Eigen::Index i = spike_at; i < std::min(n, spike_at + 10); ++i)
    x[i] = base + spike * std::exp(-static_cast<double>(i - spike_at) / 3.0);
  return x;
}

}  // namespace

TEST_CASE("jump detection finds a constructed impulse") {
  const double rate = 500.0;
  Eigen::VectorXd x = baseline_with_spike(2500, 1000, 50.0 * 9.81);
  const double t = detect_jump_reference(single_channel(x, rate), 1.0, 3.0);
  CHECK(std::abs(t - 2.000) <= 1.0 / rate + 1e-12);
}

TEST_CASE("jump detection respects the search window") {
  const double rate = 500.0;
  Eigen::VectorXd x = baseline_with_spike(5000, 1000, 40.0 * 9.81);
  Eigen::VectorXd y = baseline_with_spike(5000, 4000, 40.0 * 9.81);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = std::max(x[i], y[i]);
  const double t = detect_jump_reference(single_channel(x, rate), 7.0, 9.5);
  CHECK(std::abs(t - 8.000) <= 1.0 / rate + 1e-12);
}

TEST_CASE("jump detection under noise") {
  const double rate = 500.0;
  Rng rng(91);
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::VectorXd x(3000);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x[i] = 9.81 + 0.1 * 9.81 * rng.gaussian();
    const Eigen::Index at = 1200 + trial * 25;
    for (Eigen::Index i = at; i < at + 12; ++i)
      x[i] += 30.0 * 9.81 * std::exp(-static_cast<double>(i - at) / 4.0);
    const double t =
        detect_jump_reference(single_channel(x, rate), 1.5, 3.5);
    CHECK(std::abs(t - static_cast<double>(at) / rate) <= 0.002 + 1e-12);
  }
}

TEST_CASE("jump detection failure modes") {
  const double rate = 500.0;
  Eigen::VectorXd quiet = Eigen::VectorXd::Constant(2000, 9.81);
  CHECK_THROWS_WITH_AS(
      detect_jump_reference(single_channel(quiet, rate), 0.5, 3.0),
      doctest::Contains("no-reference-found"), Error);
  Eigen::VectorXd x = baseline_with_spike(2000, 900, 50.0);
  CHECK_THROWS_AS(detect_jump_reference(single_channel(x, rate), 3.9, 3.91),
                  Error);
}

TEST_CASE("two-point warp estimation") {
  SUBCASE("identity") {
    const LinearWarp w = estimate_linear_warp({0.0, 0.0}, {10.0, 10.0});
    CHECK(w.scale == doctest::Approx(1.0));
    CHECK(w.offset == doctest::Approx(0.0));
  }
  SUBCASE("offset plus drift") {
    const LinearWarp w = estimate_linear_warp({0.0, 0.01}, {10.0, 10.02});
    CHECK(w.scale == doctest::Approx(1.001));
    CHECK(w.offset == doctest::Approx(0.01));
  }
  SUBCASE("hand-solved 2x2 system") {
    const LinearWarp w = estimate_linear_warp({1.0, 1.005}, {61.0, 61.035});
    CHECK(w.scale == doctest::Approx(1.0005).epsilon(1e-12));
    CHECK(w.offset == doctest::Approx(0.0045).epsilon(1e-9));
  }
  SUBCASE("degenerate and implausible anchors") {
    CHECK_THROWS_WITH_AS(estimate_linear_warp({5.0, 5.0}, {5.0, 6.0}),
                         doctest::Contains("degenerate-anchor"), Error);
    CHECK_THROWS_WITH_AS(estimate_linear_warp({0.0, 0.0}, {10.0, 10.5}),
                         doctest::Contains("implausible-drift"), Error);
  }
}

TEST_CASE("warp application") {
  const double rate = 500.0;
  Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(1000, 0.0, 999.0);

  SUBCASE("identity warp is bitwise") {
    SampledSignal s = single_channel(ramp, rate);
    SampledSignal out = apply_warp(s, LinearWarp{1.0, 0.0});
    CHECK((out.data() - s.data()).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("one-sample offset shifts by one sample on the overlap") {
    SampledSignal s = single_channel(ramp, rate);
    SampledSignal out = apply_warp(s, LinearWarp{1.0, 1.0 / rate});
    for (Eigen::Index i = 1; i < s.sample_count(); ++i)
      CHECK(out.data()(i, 0) == doctest::Approx(ramp[i - 1]).epsilon(1e-12));
  }

  SUBCASE("small stretch matches the analytic interpolated ramp") {
    SampledSignal s = single_channel(ramp, rate);
    const LinearWarp w{1.001, 0.0};
    SampledSignal out = apply_warp(s, w);
    for (Eigen::Index i = 0; i < s.sample_count(); ++i) {
      const double src = w.grf_to_imu(s.time_at(i)) * rate;
      if (src < 0.0 || src > 999.0) continue;
      CHECK(out.data()(i, 0) == doctest::Approx(src).epsilon(1e-9));
    }
  }

  SUBCASE("empty overlap is rejected") {
    SampledSignal s = single_channel(Eigen::VectorXd::Zero(500), rate);
    CHECK_THROWS_WITH_AS(apply_warp(s, LinearWarp{1.0, 100.0}),
                         doctest::Contains("empty-overlap"), Error);
  }
}

TEST_CASE("warp estimate then apply maps anchors onto targets") {
  const double rate = 500.0;
  Rng rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const double scale = 1.0 + rng.uniform(-1e-3, 1e-3);
    const double offset = rng.uniform(-0.04, 0.04);
    const double i1 = 1.0, i2 = 21.0;
    const LinearWarp w =
        estimate_linear_warp({i1, scale * i1 + offset}, {i2, scale * i2 + offset});
    CHECK(std::abs(w.imu_to_grf(i1) - (scale * i1 + offset)) < 1.0 / rate);
    CHECK(std::abs(w.imu_to_grf(i2) - (scale * i2 + offset)) < 1.0 / rate);
  }
}

namespace {

/// Train of triangular bumps on two shank channels with alternating sides.
struct BumpTrain {
  SampledSignal signal;
  std::vector<Eigen::Index> starts;
  std::vector<Side> sides;
};

BumpTrain make_bump_train(int bumps, Eigen::Index spacing, Side first,
                          double noise = 0.0, std::uint64_t seed = 0) {
  const Eigen::Index n = 500 + spacing * bumps + 500;
  Eigen::MatrixXd data = Eigen::MatrixXd::Constant(n, 2, 9.81);
  Rng rng(seed + 1);
  if (noise > 0.0)
    for (Eigen::Index i = 0; i < n; ++i)
      for (int c = 0; c < 2; ++c) data(i, c) += noise * rng.gaussian();
  BumpTrain train{SampledSignal(500.0, {"left", "right"}, data), {}, {}};
  Side side = first;
  for (int b = 0; b < bumps; ++b) {
    const Eigen::Index at = 500 + b * spacing;
    const int channel = side == Side::Left ? 0 : 1;
    for (Eigen::Index j = 0; j < 50; ++j) {
      train.signal.data()(at + j, channel) += 60.0 * j / 50.0;
      train.signal.data()(at + 50 + j, channel) += 60.0 * (50.0 - j) / 50.0;
    }
    train.starts.push_back(at);
    train.sides.push_back(side);
    side = side == Side::Left ? Side::Right : Side::Left;
  }
  return train;
}

}  // namespace

TEST_CASE("segmentation recovers a constructed bump train") {
  const BumpTrain train = make_bump_train(12, 175, Side::Left);
  const StepBoundaries bounds = segment_steps(train.signal);
  REQUIRE(bounds.size() == train.starts.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    CHECK(std::abs(bounds[i].start - train.starts[i]) <= 1);
    CHECK(bounds[i].side == train.sides[i]);
  }
}

TEST_CASE("segmentation recovers sides starting from the right shank") {
  const BumpTrain train = make_bump_train(8, 170, Side::Right, 0.3, 5);
  const StepBoundaries bounds = segment_steps(train.signal);
  REQUIRE(bounds.size() == train.starts.size());
  for (std::size_t i = 0; i < bounds.size(); ++i)
    CHECK(bounds[i].side == train.sides[i]);
}

TEST_CASE("segmentation boundary spacing invariant") {
  const BumpTrain train = make_bump_train(20, 165, Side::Left, 0.5, 9);
  const StepBoundaries bounds = segment_steps(train.signal);
  for (std::size_t i = 1; i < bounds.size(); ++i)
    CHECK(bounds[i].start - bounds[i - 1].start >= 50);
}

TEST_CASE("segmentation failure modes") {
  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(1000, 1, 9.81);
  CHECK_THROWS_WITH_AS(
      segment_steps(SampledSignal(500.0, {"shank"}, flat)),
      doctest::Contains("no-steps-found"), Error);

  const BumpTrain one = make_bump_train(1, 200, Side::Left);
  CHECK(segment_steps(one.signal).size() == 1);

  CHECK_THROWS_AS(segment_steps(SampledSignal(
                      500.0, {"shank"}, Eigen::MatrixXd::Zero(100, 1))),
                  Error);
}

namespace {

Step template_step(int shift, double noise, std::uint64_t seed) {
  Eigen::VectorXd tmpl = step_template();
  Rng rng(seed);
  return make_step(
      [&](const std::string&, Eigen::Index i) {
        const Eigen::Index src = ((i - shift) % 200 + 200) % 200;
        return 10.0 * tmpl[src] + noise * rng.gaussian();
      },
      Side::Left, 700.0, {chan::kAccShankNorm});
}

}  // namespace

TEST_CASE("align shifts a pre-shifted copy back") {
  std::vector<Step> steps = {template_step(0, 0.0, 1), template_step(3, 0.0, 1)};
  const AlignedSteps aligned = align_steps(steps);
  CHECK(aligned.shifts[1] - aligned.shifts[0] == -3);
}

TEST_CASE("align of a single step applies only the global delay") {
  std::vector<Step> steps = {template_step(7, 0.0, 1)};
  const AlignedSteps aligned = align_steps(steps);
  CHECK(aligned.shifts.size() == 1);
  CHECK(aligned.shifts[0] == aligned.global_delay);
  // the global delay moves the template onset back to the window start
  CHECK(aligned.global_delay == -7);
}

TEST_CASE("align recovers injected shifts on noisy copies") {
  Rng rng(55);
  std::vector<Step> steps;
  std::vector<int> injected;
  steps.push_back(template_step(0, 0.05, 100));
  injected.push_back(0);
  for (int i = 1; i < 10; ++i) {
    const int shift = static_cast<int>(rng.uniform_int(21)) - 10;
    injected.push_back(shift);
    steps.push_back(template_step(shift, 0.05, 100 + i));
  }
  const AlignedSteps aligned = align_steps(steps);
  int recovered = 0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const int relative = aligned.shifts[i] - aligned.global_delay;
    if (relative == -injected[i]) ++recovered;
  }
  CHECK(recovered >= 9);
}

TEST_CASE("align never changes sample values") {
  Rng rng(66);
  std::vector<Step> steps;
  for (int i = 0; i < 4; ++i) steps.push_back(template_step(i * 2, 0.2, 30 + i));
  std::vector<std::multiset<double>> before;
  for (const auto& s : steps) {
    const Eigen::VectorXd v = s.channel(chan::kAccShankNorm);
    before.emplace_back(v.data(), v.data() + v.size());
  }
  const AlignedSteps aligned = align_steps(steps);
  for (std::size_t i = 0; i < aligned.steps.size(); ++i) {
    const Eigen::VectorXd v = aligned.steps[i].channel(chan::kAccShankNorm);
    const std::multiset<double> after(v.data(), v.data() + v.size());
    CHECK(after == before[i]);
  }
}
