#pragma once

#include <Eigen/Dense>

#include "grf/errors.hpp"

namespace grf {

/// How many singular values to keep: an explicit rank, or the smallest rank
/// whose retained energy (sum of squared singular values) reaches a
/// threshold fraction of the total.
struct RankPolicy {
  enum class Kind { Fixed, Energy };
  Kind kind = Kind::Energy;
  int rank = 0;
  double energy_threshold = 0.95;

  static RankPolicy fixed(int r) { return {Kind::Fixed, r, 0.0}; }
  static RankPolicy energy(double threshold = 0.95) {
    return {Kind::Energy, 0, threshold};
  }
};

/// Truncated SVD A ~= U * diag(sigma) * V^T with singular values in
/// descending order. The sign convention makes each right singular vector's
/// largest-magnitude entry positive, so factorizations are deterministic.
struct TruncatedSvd {
  Eigen::MatrixXd u;      // n x r
  Eigen::VectorXd sigma;  // r, positive, non-increasing
  Eigen::MatrixXd v;      // cols x r
  double energy_fraction = 0.0;  // retained sigma^2 over total, in (0, 1]

  int rank() const { return static_cast<int>(sigma.size()); }
  Eigen::MatrixXd reconstruct() const {
    return u * sigma.asDiagonal() * v.transpose();
  }
};

TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, const RankPolicy& policy);

}  // namespace grf
