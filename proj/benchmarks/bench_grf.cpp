#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "grf/biomech.hpp"
#include "grf/elastic_net.hpp"
#include "grf/filter.hpp"
#include "grf/knn.hpp"
#include "grf/rng.hpp"
#include "grf/ser.hpp"
#include "grf/svd.hpp"

namespace {

Eigen::MatrixXd random_matrix(grf::Rng& rng, Eigen::Index n, Eigen::Index m) {
  Eigen::MatrixXd a(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  return a;
}

grf::DesignMatrices batch_design(Eigen::Index rows, Eigen::Index m,
                                 Eigen::Index p) {
  grf::Rng rng(1);
  grf::DesignMatrices d;
  d.imu = random_matrix(rng, rows, m);
  d.grf = random_matrix(rng, rows, p);
  d.steps_per_row = 5;
  d.rows.resize(rows);
  return d;
}

void ZeroPhaseLowpass(benchmark::State& state) {
  grf::Rng rng(2);
  Eigen::MatrixXd data(state.range(0), 1);
  for (Eigen::Index i = 0; i < data.rows(); ++i) data(i, 0) = rng.uniform(-1, 1);
  const grf::SampledSignal signal(500.0, {"x"}, data);
  for (auto _ : state) {
    auto out = grf::butterworth_lowpass(signal, 20.0, 4);
    benchmark::DoNotOptimize(out.data().data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(ZeroPhaseLowpass)->Arg(12500)->Arg(50000)->Unit(benchmark::kMillisecond);

void TruncatedSvdWide(benchmark::State& state) {
  const auto d = batch_design(state.range(0), 4000, 3000);
  for (auto _ : state) {
    auto svd = grf::truncated_svd(d.imu, grf::RankPolicy::fixed(6));
    benchmark::DoNotOptimize(svd.sigma.data());
  }
}
BENCHMARK(TruncatedSvdWide)->Arg(128)->Arg(552)->Unit(benchmark::kMillisecond);

void ElasticNetFitSmall(benchmark::State& state) {
  grf::Rng rng(3);
  const Eigen::MatrixXd x = random_matrix(rng, 500, 6);
  Eigen::VectorXd y(500);
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = rng.uniform(-1, 1);
  for (auto _ : state) {
    auto fit = grf::fit_elastic_net(x, y, 1e-4, 1e-3);
    benchmark::DoNotOptimize(fit.beta.data());
  }
}
BENCHMARK(ElasticNetFitSmall);

void SerFit(benchmark::State& state) {
  const auto d = batch_design(state.range(0), 4000, 3000);
  grf::SerHyper hyper;
  hyper.steps_per_row = 5;
  hyper.imu_rank = grf::RankPolicy::fixed(6);
  hyper.grf_rank = grf::RankPolicy::fixed(6);
  hyper.lambda2 = 1e-3;
  for (auto _ : state) {
    auto model = grf::ser_fit(d, hyper);
    benchmark::DoNotOptimize(model.coefficients.data());
  }
}
BENCHMARK(SerFit)->Arg(128)->Arg(552)->Unit(benchmark::kMillisecond);

void SerPredictRow(benchmark::State& state) {
  const auto d = batch_design(256, 4000, 3000);
  grf::SerHyper hyper;
  hyper.steps_per_row = 5;
  hyper.imu_rank = grf::RankPolicy::fixed(6);
  hyper.grf_rank = grf::RankPolicy::fixed(6);
  hyper.lambda2 = 1e-3;
  const auto model = grf::ser_fit(d, hyper);
  for (auto _ : state) {
    auto y = grf::ser_predict(model, d.imu.row(0));
    benchmark::DoNotOptimize(y.data());
  }
}
BENCHMARK(SerPredictRow);

void KnnPredictRow(benchmark::State& state) {
  const auto d = batch_design(state.range(0), 4000, 3000);
  const auto model = grf::knn_fit(d, 10);
  for (auto _ : state) {
    auto pred = grf::knn_predict(model, d.imu.row(0));
    benchmark::DoNotOptimize(pred.y.data());
  }
}
BENCHMARK(KnnPredictRow)->Arg(128)->Arg(552)->Unit(benchmark::kMillisecond);

void BiomechComputeAll(benchmark::State& state) {
  Eigen::MatrixXd window = Eigen::MatrixXd::Zero(grf::Step::kSamples, 3);
  for (Eigen::Index i = 0; i < grf::Step::kSamples; ++i) {
    const double t = static_cast<double>(i) / grf::Step::kRateHz;
    if (t <= 0.25) {
      window(i, 2) = 2.4 * std::sin(std::numbers::pi * t / 0.25);
      window(i, 1) = -0.2 * std::sin(2.0 * std::numbers::pi * t / 0.25);
    }
  }
  const grf::Step step = grf::Step::make(
      {grf::chan::kGrfX, grf::chan::kGrfY, grf::chan::kGrfZ}, window,
      grf::Side::Left, 700.0);
  for (auto _ : state) {
    auto report = grf::compute_all(step, 700.0);
    benchmark::DoNotOptimize(&report);
  }
}
BENCHMARK(BiomechComputeAll);

}  // namespace

BENCHMARK_MAIN();
