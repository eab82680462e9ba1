#include <doctest.h>

#include "grf/svd.hpp"
#include "test_helpers.hpp"

using namespace grf;
using namespace grf::testing;

TEST_CASE("identity matrix decomposition") {
  const TruncatedSvd svd =
      truncated_svd(Eigen::MatrixXd::Identity(3, 3), RankPolicy::fixed(3));
  REQUIRE(svd.rank() == 3);
  for (int j = 0; j < 3; ++j) CHECK(svd.sigma[j] == doctest::Approx(1.0));
  CHECK(svd.energy_fraction == doctest::Approx(1.0));
}

TEST_CASE("rank-one matrix is reconstructed exactly at rank one") {
  Rng rng(3);
  const Eigen::VectorXd u = random_vector(rng, 12);
  const Eigen::VectorXd v = random_vector(rng, 9);
  const Eigen::MatrixXd a = u * v.transpose();
  const TruncatedSvd svd = truncated_svd(a, RankPolicy::fixed(1));
  CHECK((a - svd.reconstruct()).norm() < 1e-12 * a.norm());
  CHECK(svd.energy_fraction == doctest::Approx(1.0));
}

TEST_CASE("frobenius error equals the discarded tail") {
  Rng rng(4);
  const Eigen::MatrixXd a = random_matrix(rng, 10, 8);
  const TruncatedSvd svd = truncated_svd(a, RankPolicy::fixed(6));
  // full-SVD oracle on an independent algorithm
  Eigen::JacobiSVD<Eigen::MatrixXd> oracle(a);
  const auto& s = oracle.singularValues();
  const double tail = std::sqrt(s[6] * s[6] + s[7] * s[7]);
  CHECK(std::abs((a - svd.reconstruct()).norm() - tail) < 1e-9);
}

TEST_CASE("energy policy returns the minimal rank") {
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd a = random_matrix(rng, 12, 10);
    // skew the spectrum so the policy has something to choose
    Eigen::JacobiSVD<Eigen::MatrixXd> oracle(
        a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::VectorXd s = oracle.singularValues();
    for (Eigen::Index j = 0; j < s.size(); ++j) s[j] /= std::pow(1.8, j);
    a = oracle.matrixU().leftCols(s.size()) * s.asDiagonal() *
        oracle.matrixV().leftCols(s.size()).transpose();

    const double threshold = 0.95;
    const TruncatedSvd svd = truncated_svd(a, RankPolicy::energy(threshold));
    const double total = s.squaredNorm();
    double cum = 0.0;
    int minimal = 0;
    while (cum < threshold * total) {
      cum += s[minimal] * s[minimal];
      ++minimal;
    }
    CHECK(svd.rank() == minimal);
    CHECK(svd.energy_fraction >= threshold);
  }
}

TEST_CASE("right singular vectors are orthonormal and sign-fixed") {
  Rng rng(6);
  const Eigen::MatrixXd a = random_matrix(rng, 20, 14);
  const TruncatedSvd svd = truncated_svd(a, RankPolicy::fixed(8));
  const Eigen::MatrixXd gram = svd.v.transpose() * svd.v;
  CHECK((gram - Eigen::MatrixXd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-8);
  for (int j = 0; j < svd.rank(); ++j) {
    Eigen::Index imax = 0;
    svd.v.col(j).cwiseAbs().maxCoeff(&imax);
    CHECK(svd.v(imax, j) > 0.0);
  }
  CHECK(svd.sigma.minCoeff() > 0.0);
  for (int j = 1; j < svd.rank(); ++j) CHECK(svd.sigma[j] <= svd.sigma[j - 1]);
}

TEST_CASE("rank validation") {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(4, 4);
  CHECK_THROWS_WITH_AS(truncated_svd(a, RankPolicy::fixed(5)),
                       doctest::Contains("invalid-rank"), Error);
  CHECK_THROWS_AS(truncated_svd(a, RankPolicy::fixed(0)), Error);
  CHECK_THROWS_AS(truncated_svd(Eigen::MatrixXd(), RankPolicy::fixed(1)), Error);
}

TEST_CASE("wide matrices take the gram route and stay exact") {
  // min(n, m) above the direct-SVD limit exercises the Gram-based path;
  // a smooth low-rank-plus-noise matrix mimics batched gait signals.
  Rng rng(7);
  const Eigen::Index n = 300, m = 1200;
  Eigen::MatrixXd a(n, m);
  const Eigen::MatrixXd basis = random_matrix(rng, 8, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    a.row(i).setZero();
    for (int b = 0; b < 8; ++b)
      a.row(i) += rng.uniform(-2.0, 2.0) * basis.row(b);
    for (Eigen::Index j = 0; j < m; ++j) a(i, j) += 1e-3 * rng.gaussian();
  }
  const TruncatedSvd svd = truncated_svd(a, RankPolicy::fixed(6));
  Eigen::BDCSVD<Eigen::MatrixXd> oracle(a);
  for (int j = 0; j < 6; ++j)
    CHECK(std::abs(svd.sigma[j] - oracle.singularValues()[j]) <
          1e-8 * oracle.singularValues()[0]);
  // reconstruction error matches the discarded tail
  double tail = 0.0;
  for (Eigen::Index j = 6; j < oracle.singularValues().size(); ++j)
    tail += oracle.singularValues()[j] * oracle.singularValues()[j];
  CHECK(std::abs((a - svd.reconstruct()).norm() - std::sqrt(tail)) <
        1e-6 * a.norm());
  const Eigen::MatrixXd vgram = svd.v.transpose() * svd.v;
  CHECK((vgram - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("embedding round trip") {
  Rng rng(8);
  const Eigen::MatrixXd a = random_matrix(rng, 15, 40);
  const TruncatedSvd svd = truncated_svd(a, RankPolicy::fixed(6));
  // row_i V Sigma^-1 equals row i of U
  const Eigen::MatrixXd embedded =
      a * svd.v * svd.sigma.cwiseInverse().asDiagonal();
  CHECK((embedded - svd.u).cwiseAbs().maxCoeff() < 1e-8);
}
