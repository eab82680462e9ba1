#include <doctest.h>

#include "grf/elastic_net.hpp"
#include "test_helpers.hpp"

using namespace grf;
using namespace grf::testing;

namespace {

// Closed-form ridge on the intercept-augmented design, the independent
// oracle for the lambda1 = 0 limit.
std::pair<Eigen::VectorXd, double> ridge_oracle(const Eigen::MatrixXd& x,
                                                const Eigen::VectorXd& y,
                                                double lambda2,
                                                bool penalize_intercept) {
  const Eigen::Index d = x.cols();
  Eigen::MatrixXd xt(x.rows(), d + 1);
  xt.leftCols(d) = x;
  xt.col(d).setOnes();
  Eigen::MatrixXd lhs = xt.transpose() * xt;
  for (Eigen::Index j = 0; j < d; ++j) lhs(j, j) += lambda2;
  if (penalize_intercept) lhs(d, d) += lambda2;
  const Eigen::VectorXd theta = lhs.ldlt().solve(xt.transpose() * y);
  return {theta.head(d), theta[d]};
}

}  // namespace

TEST_CASE("two points are interpolated exactly") {
  Eigen::MatrixXd x(2, 1);
  x << 0.0, 1.0;
  Eigen::VectorXd y(2);
  y << 1.0, 3.0;
  const ElasticNetFit fit = fit_elastic_net(x, y, 0.0, 0.0);
  CHECK(fit.beta[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("large lambda1 kills every penalized coefficient") {
  Rng rng(31);
  const Eigen::MatrixXd x = random_matrix(rng, 25, 4);
  const Eigen::VectorXd y = random_vector(rng, 25);
  const double kill = 2.0 * (x.transpose() * y).cwiseAbs().maxCoeff() +
                      2.0 * std::abs(y.sum());
  const ElasticNetFit fit = fit_elastic_net(x, y, kill, 0.0);
  CHECK(fit.beta.cwiseAbs().maxCoeff() == 0.0);
  CHECK(fit.intercept == 0.0);
}

TEST_CASE("lambda1 = 0 matches the closed-form ridge") {
  Rng rng(32);
  const Eigen::MatrixXd x = random_matrix(rng, 20, 3);
  const Eigen::VectorXd y = random_vector(rng, 20);
  const ElasticNetFit fit = fit_elastic_net(x, y, 0.0, 0.5);
  const auto [beta, alpha] = ridge_oracle(x, y, 0.5, true);
  CHECK((fit.beta - beta).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(fit.intercept - alpha) < 1e-8);
}

TEST_CASE("unpenalized intercept mode matches its oracle") {
  Rng rng(33);
  const Eigen::MatrixXd x = random_matrix(rng, 30, 4);
  const Eigen::VectorXd y = random_vector(rng, 30);
  const ElasticNetFit fit =
      fit_elastic_net(x, y, 0.0, 0.8, /*penalize_intercept=*/false);
  const auto [beta, alpha] = ridge_oracle(x, y, 0.8, false);
  CHECK((fit.beta - beta).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(fit.intercept - alpha) < 1e-8);
}

TEST_CASE("input validation") {
  Eigen::MatrixXd x(3, 2);
  x.setOnes();
  Eigen::VectorXd y(3);
  y.setOnes();
  CHECK_THROWS_AS(fit_elastic_net(x, y, -1.0, 0.0), Error);
  CHECK_THROWS_AS(fit_elastic_net(x, Eigen::VectorXd::Ones(2), 0.0, 0.0), Error);
  x(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_WITH_AS(fit_elastic_net(x, y, 0.0, 0.0),
                       doctest::Contains("non-finite"), Error);
}

TEST_CASE("sweep budget exhaustion carries the last iterate") {
  Rng rng(34);
  const Eigen::MatrixXd x = random_matrix(rng, 40, 5);
  const Eigen::VectorXd y = random_vector(rng, 40);
  try {
    fit_elastic_net(x, y, 0.0, 0.3, true, 0.0, 2);  // zero tolerance, 2 sweeps
    FAIL("expected a convergence error");
  } catch (const ConvergenceError& e) {
    CHECK(e.beta.size() == 5);
    CHECK(std::isfinite(e.intercept));
  }
}
