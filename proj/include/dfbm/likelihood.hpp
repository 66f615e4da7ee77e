#pragma once

#include "dfbm/estimation.hpp"
#include "dfbm/simplex.hpp"
#include "dfbm/types.hpp"

namespace dfbm {

struct LikelihoodValue {
    double value = 0.0;        ///< natural-log scale
    double jitter_used = 0.0;  ///< diagonal jitter the factorization needed
};

/// Exact Gaussian log-likelihood of a standard delampertized fBm:
/// 1/2 ln det(Sigma^-1) - N/2 ln(2 pi) - 1/2 S' Sigma^-1 S.
///
/// Computed from the Cholesky factor of Sigma: the log-determinant from its
/// diagonal, the quadratic form from one triangular solve. Sigma^-1 is never
/// formed. Throws ConditioningError if factorization fails past the jitter cap.
LikelihoodValue log_likelihood(const TimeSeries& series, double hurst, double theta);

/// Likelihood of S = mu 1 + sigma Y with Y standard:
/// 1/2 ln det(Sigma^-1) - N/2 ln(2 pi sigma^2) - (S - mu)' Sigma^-1 (S - mu) / (2 sigma^2).
LikelihoodValue log_likelihood_affine(const TimeSeries& series, double hurst, double theta, double mu,
                                      double sigma);

/// Maximizes log_likelihood over (H, theta) with Nelder-Mead.
/// Requires at least two observations.
EstimationResult fit_ml(const TimeSeries& series, const SimplexOptions& options = {});

}  // namespace dfbm
