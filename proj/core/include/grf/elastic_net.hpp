#pragma once

#include <Eigen/Dense>

#include "grf/errors.hpp"

namespace grf {

struct ElasticNetFit {
  Eigen::VectorXd beta;
  double intercept = 0.0;
  int sweeps = 0;
};

/// Raised when coordinate descent exhausts its sweep budget; carries the
/// last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& message, Eigen::VectorXd last_beta,
                   double last_intercept)
      : Error(ErrorCode::ConvergenceFailure, message),
        beta(std::move(last_beta)),
        intercept(last_intercept) {}

  Eigen::VectorXd beta;
  double intercept;
};

/// Minimizes sum_i (y_i - x_i beta - alpha)^2 + lambda2 ||[beta alpha]||_2^2
/// + lambda1 ||[beta alpha]||_1 by cyclic coordinate descent with
/// soft-thresholding. The intercept is penalized exactly as written in the
/// loss; `penalize_intercept=false` exempts it for sensitivity studies.
ElasticNetFit fit_elastic_net(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                              double lambda1, double lambda2,
                              bool penalize_intercept = true,
                              double tolerance = 1e-10,
                              int max_sweeps = 100000);

}  // namespace grf
