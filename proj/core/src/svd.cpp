#include "grf/svd.hpp"

#include <algorithm>
#include <cmath>

#include "grf/rng.hpp"

namespace grf {

namespace {

// Below this size the decomposition runs on Eigen's bidiagonalization path.
// Design matrices are short and very wide; above the limit the spectrum
// comes from the small Gram matrix instead, with the long-side singular
// vectors recovered only for the retained rank. Both routes are exact: the
// Gram route refines leading eigenpairs by blocked subspace iteration to a
// residual tolerance and falls back to a full eigendecomposition whenever
// the iteration cannot certify them.
constexpr Eigen::Index kDirectSvdLimit = 256;

struct LeadingEigs {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // k x count
  bool certified = false;
};

LeadingEigs leading_eigenpairs(const Eigen::MatrixXd& gram, Eigen::Index count) {
  const Eigen::Index k = gram.rows();
  const Eigen::Index block =
      std::min<Eigen::Index>(k, std::max<Eigen::Index>(2 * count + 6, 24));

  Rng rng(Rng::hash_tag(0x5bd1e995ULL, "subspace") ^
          static_cast<std::uint64_t>(k * 131 + count));
  Eigen::MatrixXd q(k, block);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < block; ++j) q(i, j) = rng.gaussian();

  const double scale = std::max(gram.diagonal().maxCoeff(), 1e-300);
  LeadingEigs out;
  Eigen::MatrixXd gq;
  for (int iter = 0; iter < 256; ++iter) {
    gq.noalias() = gram * q;
    // Rayleigh-Ritz every few sweeps, with a residual certificate.
    if (iter % 4 == 3) {
      Eigen::MatrixXd small(block, block);
      small.noalias() = q.transpose() * gq;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ritz(small);
      Eigen::MatrixXd rotated(k, block);
      Eigen::VectorXd values(block);
      for (Eigen::Index j = 0; j < block; ++j) {
        const Eigen::Index src = block - 1 - j;
        rotated.col(j) = q * ritz.eigenvectors().col(src);
        values[j] = ritz.eigenvalues()[src];
      }
      bool converged = true;
      Eigen::MatrixXd residual(k, count);
      residual.noalias() = gram * rotated.leftCols(count);
      for (Eigen::Index j = 0; j < count; ++j) {
        residual.col(j) -= values[j] * rotated.col(j);
        if (residual.col(j).norm() > 1e-11 * scale) {
          converged = false;
          break;
        }
      }
      if (converged) {
        out.values = values.head(count);
        out.vectors = rotated.leftCols(count);
        out.certified = true;
        return out;
      }
      q = rotated;
      gq.noalias() = gram * q;
    }
    // orthonormalize the iterated block
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gq);
    q.noalias() =
        qr.householderQ() * Eigen::MatrixXd::Identity(k, block);
  }
  return out;  // not certified; caller falls back
}

}  // namespace

TruncatedSvd truncated_svd(const Eigen::MatrixXd& a, const RankPolicy& policy) {
  if (a.rows() == 0 || a.cols() == 0)
    fail(ErrorCode::EmptyDesign, "cannot decompose an empty matrix");
  const Eigen::Index k = std::min(a.rows(), a.cols());
  if (policy.kind == RankPolicy::Kind::Fixed &&
      (policy.rank < 1 || policy.rank > k))
    fail(ErrorCode::InvalidRank,
         "rank " + std::to_string(policy.rank) + " outside [1, " +
             std::to_string(k) + "]");
  if (policy.kind == RankPolicy::Kind::Energy &&
      !(policy.energy_threshold > 0.0 && policy.energy_threshold <= 1.0))
    fail(ErrorCode::InvalidArgument, "energy threshold must be in (0, 1]");

  const double total_energy = a.squaredNorm();
  if (!(total_energy > 0.0))
    fail(ErrorCode::NumericalFailure, "matrix has zero Frobenius norm");

  // Full spectrum (descending) plus the small-side vectors it comes with.
  Eigen::VectorXd sigma;
  Eigen::MatrixXd u_full, v_full;   // direct path only
  Eigen::MatrixXd small_vectors;    // gram path only, k x count
  bool direct = k <= kDirectSvdLimit;
  const bool rows_small = a.rows() <= a.cols();

  if (!direct) {
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(k, k);
    if (rows_small)
      gram.selfadjointView<Eigen::Lower>().rankUpdate(a);
    else
      gram.selfadjointView<Eigen::Lower>().rankUpdate(a.transpose());
    gram.triangularView<Eigen::Upper>() = gram.transpose();

    const Eigen::Index want =
        policy.kind == RankPolicy::Kind::Fixed
            ? policy.rank
            : std::min<Eigen::Index>(k, 32);
    LeadingEigs eigs = leading_eigenpairs(gram, want);
    bool enough = eigs.certified;
    if (enough && policy.kind == RankPolicy::Kind::Energy) {
      double cum = 0.0;
      for (Eigen::Index j = 0; j < eigs.values.size(); ++j)
        cum += std::max(eigs.values[j], 0.0);
      enough = cum >= policy.energy_threshold * total_energy;
    }
    if (enough) {
      sigma.resize(eigs.values.size());
      for (Eigen::Index j = 0; j < sigma.size(); ++j)
        sigma[j] = std::sqrt(std::max(eigs.values[j], 0.0));
      small_vectors = std::move(eigs.vectors);
    } else {
      // exact fallback: flat spectra or unusual energy targets
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
      sigma.resize(k);
      small_vectors.resize(k, k);
      for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index src = k - 1 - j;
        sigma[j] = std::sqrt(std::max(eig.eigenvalues()[src], 0.0));
        small_vectors.col(j) = eig.eigenvectors().col(src);
      }
    }
  } else {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(a,
                                       Eigen::ComputeThinU | Eigen::ComputeThinV);
    sigma = svd.singularValues();
    u_full = svd.matrixU();
    v_full = svd.matrixV();
  }

  Eigen::Index r = 0;
  if (policy.kind == RankPolicy::Kind::Fixed) {
    r = policy.rank;
  } else {
    double cum = 0.0;
    const double target = policy.energy_threshold * total_energy;
    while (r < sigma.size()) {
      cum += sigma[r] * sigma[r];
      ++r;
      if (cum >= target) break;
    }
  }
  // Never retain a vanishing singular value.
  const double sigma_floor = sigma[0] * 1e-12;
  while (r > 1 && sigma[r - 1] <= sigma_floor) --r;

  TruncatedSvd out;
  out.sigma = sigma.head(r);
  if (direct) {
    out.u = u_full.leftCols(r);
    out.v = v_full.leftCols(r);
  } else {
    // recover the long-side vectors only for the retained rank
    const Eigen::MatrixXd small_r = small_vectors.leftCols(r);
    Eigen::MatrixXd long_r(rows_small ? a.cols() : a.rows(), r);
    if (rows_small)
      long_r.noalias() = a.transpose() * small_r;
    else
      long_r.noalias() = a * small_r;
    for (Eigen::Index j = 0; j < r; ++j) long_r.col(j) /= out.sigma[j];
    if (rows_small) {
      out.u = small_r;
      out.v = std::move(long_r);
    } else {
      out.u = std::move(long_r);
      out.v = small_r;
    }
  }
  out.energy_fraction = out.sigma.squaredNorm() / total_energy;

  // Deterministic sign: largest-magnitude entry of each right singular
  // vector is positive.
  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index imax = 0;
    out.v.col(j).cwiseAbs().maxCoeff(&imax);
    if (out.v(imax, j) < 0.0) {
      out.v.col(j) = -out.v.col(j);
      out.u.col(j) = -out.u.col(j);
    }
  }
  return out;
}

}  // namespace grf
