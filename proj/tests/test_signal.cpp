#include <doctest.h>

#include "grf/signal.hpp"
#include "test_helpers.hpp"

using namespace grf;
using namespace grf::testing;

TEST_CASE("sampled signal invariants") {
  Eigen::MatrixXd data(4, 2);
  data.setZero();
  CHECK_THROWS_AS(SampledSignal(0.0, {"a", "b"}, data), Error);
  CHECK_THROWS_AS(SampledSignal(500.0, {"a"}, data), Error);
  data(2, 1) = std::nan("");
  CHECK_THROWS_WITH_AS(SampledSignal(500.0, {"a", "b"}, data),
                       doctest::Contains("non-finite-value"), Error);
}

TEST_CASE("l2 norm of channel triples") {
  Eigen::MatrixXd data(2, 3);
  data << 3.0, 4.0, 0.0, 0.0, 0.0, 0.0;
  SampledSignal s(500.0, {"x", "y", "z"}, data);
  SampledSignal norm = l2_norm_channels(s, {"x", "y", "z"}, "norm");
  CHECK(norm.channel_count() == 1);
  CHECK(norm.data()(0, 0) == doctest::Approx(5.0));
  CHECK(norm.data()(1, 0) == doctest::Approx(0.0));
  CHECK_THROWS_WITH_AS(l2_norm_channels(s, {"x", "y", "w"}),
                       doctest::Contains("unknown-channel"), Error);
}

TEST_CASE("l2 norm matches brute force and is nonnegative") {
  Rng rng(11);
  Eigen::MatrixXd data = random_matrix(rng, 100, 3, -5.0, 5.0);
  SampledSignal s(500.0, {"x", "y", "z"}, data);
  SampledSignal norm = l2_norm_channels(s, {"x", "y", "z"});
  for (Eigen::Index i = 0; i < 100; ++i) {
    const double expected =
        std::sqrt(data(i, 0) * data(i, 0) + data(i, 1) * data(i, 1) +
                  data(i, 2) * data(i, 2));
    CHECK(std::abs(norm.data()(i, 0) - expected) < 1e-12);
    CHECK(norm.data()(i, 0) >= 0.0);
  }
}

TEST_CASE("body weight normalization") {
  Eigen::MatrixXd data(3, 1);
  data << 700.0, 0.0, 1400.0;
  SampledSignal grf(1000.0, {"grf_z"}, data);
  SampledSignal bw = normalize_by_bodyweight(grf, 700.0);
  CHECK(bw.data()(0, 0) == doctest::Approx(1.0));
  CHECK(bw.data()(1, 0) == doctest::Approx(0.0));
  CHECK(bw.data()(2, 0) == doctest::Approx(2.0));
  CHECK_THROWS_AS(normalize_by_bodyweight(grf, 0.0), Error);
  CHECK_THROWS_AS(normalize_by_bodyweight(grf, -5.0), Error);
}

TEST_CASE("step invariants") {
  Eigen::MatrixXd ok(Step::kSamples, 1);
  ok.setZero();
  CHECK_NOTHROW(Step::make({"grf_z"}, ok, Side::Left, 700.0));
  Eigen::MatrixXd wrong(150, 1);
  wrong.setZero();
  CHECK_THROWS_AS(Step::make({"grf_z"}, wrong, Side::Left, 700.0), Error);
  CHECK_THROWS_AS(Step::make({"grf_z"}, ok, Side::Left, 0.0), Error);
}

TEST_CASE("sensor set channel selection") {
  // encode the channel identity in the values so ordering is checkable
  const auto& layout = step_channel_layout();
  Step step = make_step([&](const std::string& c, Eigen::Index i) {
    const auto idx = std::find(layout.begin(), layout.end(), c) - layout.begin();
    return 1000.0 * static_cast<double>(idx) + static_cast<double>(i);
  });

  SUBCASE("sac-acc yields the sacrum norm sequence") {
    Eigen::RowVectorXd row = select_sensor_channels(step, SensorSet::SacAcc);
    REQUIRE(row.size() == 200);
    for (Eigen::Index i = 0; i < 200; ++i)
      CHECK(row[i] == doctest::Approx(3000.0 + i));  // acc_sacrum_norm block
  }

  SUBCASE("sac-acc3d is 600 values in x,y,z block order") {
    Eigen::RowVectorXd row = select_sensor_channels(step, SensorSet::SacAcc3d);
    REQUIRE(row.size() == 600);
    CHECK(row[0] == doctest::Approx(0.0));      // acc_sacrum_x sample 0
    CHECK(row[200] == doctest::Approx(1000.0)); // acc_sacrum_y sample 0
    CHECK(row[400] == doctest::Approx(2000.0)); // acc_sacrum_z sample 0
    CHECK(row[599] == doctest::Approx(2199.0));
  }

  SUBCASE("all is 800 values and starts with the sac-acc block") {
    Eigen::RowVectorXd all = select_sensor_channels(step, SensorSet::All);
    REQUIRE(all.size() == 800);
    Eigen::RowVectorXd sac = select_sensor_channels(step, SensorSet::SacAcc);
    CHECK((all.head(200) - sac).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("all acceleration block equals acc") {
    Eigen::RowVectorXd all = select_sensor_channels(step, SensorSet::All);
    Eigen::RowVectorXd acc = select_sensor_channels(step, SensorSet::Acc);
    REQUIRE(acc.size() == 400);
    CHECK((all.head(400) - acc).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("dimension bookkeeping per variant") {
    CHECK(sensor_values_per_step(SensorSet::All) == 800);
    CHECK(sensor_values_per_step(SensorSet::Acc) == 400);
    CHECK(sensor_values_per_step(SensorSet::Ang) == 400);
    CHECK(sensor_values_per_step(SensorSet::Sacrum) == 400);
    CHECK(sensor_values_per_step(SensorSet::Shanks) == 400);
    CHECK(sensor_values_per_step(SensorSet::SacAcc3d) == 600);
    CHECK(sensor_values_per_step(SensorSet::SacAcc) == 200);
  }

  SUBCASE("missing channel is an unknown-channel error") {
    Step bare = make_step([](const std::string&, Eigen::Index) { return 0.0; },
                          Side::Left, 700.0, {chan::kGrfZ});
    CHECK_THROWS_WITH_AS(select_sensor_channels(bare, SensorSet::All),
                         doctest::Contains("unknown-channel"), Error);
  }
}

TEST_CASE("sensor set names round-trip") {
  for (SensorSet s : kAllSensorSets)
    CHECK(sensor_set_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(sensor_set_from_string("magnetometer"), Error);
}
