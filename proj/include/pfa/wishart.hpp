#pragma once

// Wishart sampling and the conjugate precision update for the latent
// multivariate Brownian diffusion (LMBD) baseline.
//
// Parameterization: W ~ Wishart(nu, S) has density proportional to
// |W|^{(nu-P-1)/2} exp(-tr(S^{-1} W) / 2) with E[W] = nu S.

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "pfa/errors.hpp"
#include "pfa/random.hpp"
#include "pfa/tree.hpp"

namespace pfa {

struct WishartPrior {
  double nu = 0.0;            // degrees of freedom, >= P
  Eigen::MatrixXd lambda_r0;  // P x P scale matrix
};

struct PrecisionMatrix {
  Eigen::MatrixXd sigma_inv;  // P x P symmetric positive definite
  WishartPrior prior;
};

// Bartlett decomposition draw.
inline Eigen::MatrixXd wishart_sample(std::mt19937_64& rng, double nu,
                                      const Eigen::MatrixXd& scale) {
  const int p = static_cast<int>(scale.rows());
  if (!(nu > p - 1)) throw NumericalError("wishart: degrees of freedom too small");
  Eigen::LLT<Eigen::MatrixXd> llt(scale);
  if (llt.info() != Eigen::Success)
    throw NumericalError("wishart: scale matrix is not positive definite");
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    A(i, i) = std::sqrt(chi_squared_sample(rng, nu - i));
    for (int j = 0; j < i; ++j) A(i, j) = standard_normal(rng);
  }
  const Eigen::MatrixXd LA = llt.matrixL() * A;
  return LA * LA.transpose();
}

// Full conditional draw of Sigma^{-1} for Z ~ MN(1 mu0', psi + J/kappa0,
// Sigma) with Sigma^{-1} ~ Wishart(nu, Lambda_R0):
//   Sigma^{-1} | Z ~ Wishart(nu + N, (Lambda_R0^{-1} + C' R^{-1} C)^{-1}),
// where C = Z - 1 mu0' and R is the full row covariance. Z may have zero rows,
// in which case this reduces to a prior draw.
inline PrecisionMatrix gibbs_precision_matrix(const Eigen::MatrixXd& Z, const TreeCovariance& cov,
                                              const WishartPrior& prior, std::mt19937_64& rng) {
  const int n = static_cast<int>(Z.rows());
  const int p = static_cast<int>(Z.cols());
  if (prior.lambda_r0.rows() != p || prior.lambda_r0.cols() != p)
    throw ValidationError("wishart prior scale has wrong dimensions");
  if (prior.nu < p) throw ValidationError("wishart prior needs nu >= P");

  Eigen::LLT<Eigen::MatrixXd> prior_llt(prior.lambda_r0);
  if (prior_llt.info() != Eigen::Success)
    throw NumericalError("wishart prior scale is not positive definite");
  Eigen::MatrixXd scale_inv =
      prior_llt.solve(Eigen::MatrixXd::Identity(p, p));

  if (n > 0) {
    Eigen::MatrixXd centered = Z;
    if (cov.mu0.size() > 0) centered.rowwise() -= cov.mu0.transpose();
    Eigen::LLT<Eigen::MatrixXd> row_llt(cov.full());
    if (row_llt.info() != Eigen::Success)
      throw NumericalError("row covariance is not positive definite");
    const Eigen::MatrixXd A = row_llt.matrixL().solve(centered);
    scale_inv += A.transpose() * A;
  }

  Eigen::LLT<Eigen::MatrixXd> scale_inv_llt(scale_inv);
  if (scale_inv_llt.info() != Eigen::Success)
    throw NumericalError("posterior wishart scale is not positive definite");
  const Eigen::MatrixXd scale = scale_inv_llt.solve(Eigen::MatrixXd::Identity(p, p));

  PrecisionMatrix out;
  out.prior = prior;
  out.sigma_inv = wishart_sample(rng, prior.nu + n, scale);
  return out;
}

}  // namespace pfa
