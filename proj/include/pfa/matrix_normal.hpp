#pragma once

// Matrix-normal density under Brownian diffusion on the tree, and draws from
// the factor tree prior MN(0, psi + J/kappa0, I_K).

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "pfa/errors.hpp"
#include "pfa/random.hpp"
#include "pfa/tree.hpp"

namespace pfa {

namespace detail {

inline double cholesky_logdet(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

}  // namespace detail

// log MN(X; 1 mu0', rowcov, colcov) with the column covariance supplied as its
// inverse. Uses Cholesky solves throughout; the row covariance is never
// inverted explicitly.
inline double matrix_normal_logdensity(const Eigen::MatrixXd& X, const Eigen::VectorXd& mu0,
                                       const Eigen::MatrixXd& rowcov,
                                       const Eigen::MatrixXd& colcov_inv) {
  const int n = static_cast<int>(X.rows());
  const int p = static_cast<int>(X.cols());
  if (rowcov.rows() != n || rowcov.cols() != n || colcov_inv.rows() != p ||
      colcov_inv.cols() != p || mu0.size() != p)
    throw ValidationError("matrix normal: dimension mismatch");

  Eigen::LLT<Eigen::MatrixXd> row_llt(rowcov);
  if (row_llt.info() != Eigen::Success)
    throw NumericalError("matrix normal: row covariance is not positive definite");
  Eigen::LLT<Eigen::MatrixXd> colinv_llt(colcov_inv);
  if (colinv_llt.info() != Eigen::Success)
    throw NumericalError("matrix normal: column precision is not positive definite");

  const Eigen::MatrixXd centered = X.rowwise() - mu0.transpose();
  // A = Lrow^{-1} C, so A' A = C' rowcov^{-1} C.
  const Eigen::MatrixXd A = row_llt.matrixL().solve(centered);
  const double quad = (colcov_inv * (A.transpose() * A)).trace();

  const double logdet_row = detail::cholesky_logdet(row_llt);
  const double logdet_colinv = detail::cholesky_logdet(colinv_llt);
  return -0.5 * quad - 0.5 * n * p * std::log(2.0 * M_PI) + 0.5 * n * logdet_colinv -
         0.5 * p * logdet_row;
}

// Draw F ~ MN(0, psi + J/kappa0, I_K): one Cholesky of the row covariance,
// applied to a column of standard normals per factor. K = 0 yields an N x 0
// matrix. Deterministic given the engine state (column-major fill).
inline Eigen::MatrixXd sample_tree_prior(const TreeCovariance& cov, int num_factors,
                                         std::mt19937_64& rng) {
  const int n = static_cast<int>(cov.psi.rows());
  Eigen::MatrixXd F(n, num_factors);
  if (num_factors == 0) return F;
  Eigen::LLT<Eigen::MatrixXd> llt(cov.full());
  if (llt.info() != Eigen::Success)
    throw NumericalError("tree prior: row covariance is not positive definite");
  for (int k = 0; k < num_factors; ++k) {
    for (int i = 0; i < n; ++i) F(i, k) = standard_normal(rng);
  }
  return llt.matrixL() * F;
}

}  // namespace pfa
