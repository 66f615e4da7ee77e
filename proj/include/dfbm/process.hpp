#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "dfbm/types.hpp"

namespace dfbm {

enum class Model { fbm, delampertized };

/// E[X_s X_t] for an fBm: sigma^2/2 (|t|^2H + |s|^2H - |t-s|^2H).
double fbm_covariance(double s, double t, double hurst, double sigma);

/// Correlation at lag `dt` of a standard delampertized fBm:
/// cosh(theta H dt) - 2^(2H-1) |sinh(theta dt / 2)|^(2H).
///
/// Evaluated in a form where the two exponentially growing terms cancel
/// analytically, so it stays finite for arbitrarily large theta * |dt|.
double delamperti_covariance(double dt, double hurst, double theta);

/// Covariance of the standard (sigma = 1, mu = 0) model on `grid`.
/// The delampertized matrix has a unit diagonal; the fBm matrix has a zero
/// row and column wherever a time equals 0.
Eigen::MatrixXd build_covariance_matrix(const TimeGrid& grid, const ModelParams& params, Model model);

/// Lower Cholesky factor and the diagonal jitter that was needed to get it.
struct CholeskyFactor {
    Eigen::MatrixXd lower;
    double jitter = 0.0;
};

/// Jitter ladder applied (relative to the largest diagonal entry) when a
/// plain factorization fails: 1e-12, 1e-11, ..., 1e-8.
inline constexpr double kFirstJitter = 1e-12;
inline constexpr double kMaxJitter = 1e-8;

/// Cholesky factorization with jitter escalation. Rows and columns whose
/// diagonal is exactly zero (fBm at t = 0) are factored out and left as
/// zeros in the returned factor. Throws ConditioningError past kMaxJitter.
CholeskyFactor factorize_covariance(const Eigen::MatrixXd& covariance);

/// Draws many paths from one factorization; used by Monte-Carlo loops.
class PathSampler {
public:
    PathSampler(TimeGrid grid, const ModelParams& params, Model model);

    /// mu + sigma * L g with g drawn from GaussianStream(seed).
    TimeSeries sample(std::uint64_t seed) const;

    const CholeskyFactor& factor() const noexcept { return factor_; }
    const TimeGrid& grid() const noexcept { return grid_; }

private:
    TimeGrid grid_;
    ModelParams params_;
    CholeskyFactor factor_;
};

/// Exact Gaussian sample of the model on `grid`; deterministic in `seed`.
TimeSeries sample_path(const TimeGrid& grid, const ModelParams& params, Model model, std::uint64_t seed);

/// Adds independent N(0, noise_sd^2) noise to every observation.
TimeSeries add_white_noise(const TimeSeries& series, double noise_sd, std::uint64_t seed);

}  // namespace dfbm
