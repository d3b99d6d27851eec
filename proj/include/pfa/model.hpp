#pragma once

// Factor model state, hyperparameters and the prior on the factor count.

#include <Eigen/Dense>
#include <cmath>

#include "pfa/errors.hpp"

namespace pfa {

// Defaults follow the data-scaled parameterization: standardized traits, unit
// loadings prior, Gamma(1/3, 1/3) residual precisions, exponential cut-point
// spacings with mean 1/2.
struct Hyperparameters {
  double alpha_lambda = 1.0 / 3.0;   // Gamma shape for continuous residual precisions
  double beta_lambda = 1.0 / 3.0;    // Gamma rate
  double loadings_mean = 0.0;        // prior mean of free loadings entries
  double loadings_precision = 1.0;   // prior precision of free loadings entries
  double kappa0 = 1.0;               // root pseudo-observation sample size
  double cutpoint_rate = 2.0;        // exponential rate of cut-point spacings

  void validate() const {
    if (!(alpha_lambda > 0) || !(beta_lambda > 0) || !(loadings_precision > 0) ||
        !(kappa0 > 0) || !(cutpoint_rate > 0))
      throw ValidationError("hyperparameters must be positive");
  }
};

// F maps taxa to K latent factors; L maps factors to traits with structural
// zeros L(k, j) = 0 for k > j; Lambda holds per-trait residual precisions,
// pinned to 1 for discrete traits.
struct FactorState {
  Eigen::MatrixXd F;       // N x K
  Eigen::MatrixXd L;       // K x P
  Eigen::VectorXd lambda;  // length P
  int num_factors = 0;
};

inline int num_free_loadings(int j, int num_factors) { return std::min(j + 1, num_factors); }

// Rate of the zero-truncated Poisson prior on K chosen so that p(K = 1) = 1/2,
// i.e. the root of lambda e^{-lambda} / (1 - e^{-lambda}) = 1/2.
inline double ztp_rate_half_mass_at_one() {
  double lo = 1e-8;
  double hi = 3.0;
  auto f = [](double x) { return x / std::expm1(x) - 0.5; };
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double prior_k_logpmf(int k, double rate) {
  if (k < 1) throw ValidationError("zero-truncated Poisson: k must be >= 1");
  return k * std::log(rate) - std::lgamma(k + 1.0) - rate - std::log1p(-std::exp(-rate));
}

inline double prior_k_logpmf(int k) {
  static const double rate = ztp_rate_half_mass_at_one();
  return prior_k_logpmf(k, rate);
}

}  // namespace pfa
