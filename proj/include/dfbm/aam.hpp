#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "dfbm/estimation.hpp"
#include "dfbm/kernels.hpp"
#include "dfbm/simplex.hpp"
#include "dfbm/types.hpp"

namespace dfbm {

// ---------------------------------------------------------------------------
// Moments of increments
// ---------------------------------------------------------------------------

/// A(sigma, k) = 2^(k/2) Gamma((k+1)/2) / Gamma(1/2) * sigma^k, i.e. E|sigma G|^k.
double absolute_moment_constant(double sigma, double k);

/// (1/N) sum |S_i - S_{i-1}|^k over the N consecutive increments of `series`.
double empirical_absolute_moment(const TimeSeries& series, double k);

/// Parameters of E[M_{k,N,ta,tb}(Z)] for Z = L_{H',theta'} L^-1_{H,theta} X.
struct MomentQuery {
    double k = 2.0;
    std::size_t n = 1;  ///< number of increments
    double t_a = 1.0;
    double t_b = 2.0;
    double hurst = 0.5;
    double theta = 1.0;
    double hurst_p = 0.5;
    double theta_p = 1.0;
    double sigma = 1.0;
};

/// Exact finite-N expectation of the absolute moment of Z on [t_a, t_b].
double theoretical_moment(const MomentQuery& q);

/// N -> infinity equivalent:
/// A (t_b^e - t_a^e) / e * (theta/theta')^(kH) (t_b - t_a)^(kH-1) N^(-kH), e = k(H'-H)+1.
/// Throws DomainError when e == 0 (the limit is logarithmic there).
double asymptotic_moment(const MomentQuery& q);

// ---------------------------------------------------------------------------
// Scales, kernel regression, log-log regressions
// ---------------------------------------------------------------------------

/// Scales (in transformed time) at which the moments are estimated.
struct ScaleGrid {
    std::vector<double> scales;  ///< strictly increasing, positive
    double rho = 0.2;
    double step = 0.001;
    std::size_t n_obs = 0;

    std::size_t size() const noexcept { return scales.size(); }
};

/// n scales log-uniformly spanning [exp(theta' step) - 1, exp(theta' step rho N) - 1].
/// Throws DomainError on bad inputs, EstimationError if the span collapses.
ScaleGrid build_scale_grid(double theta_p, double step, std::size_t n_obs, double rho, std::size_t n_scales);

/// Kernel used to smooth absolute increments across pair distances.
/// Without a bandwidth, each scale tau gets
///   min(max(largest gap to a neighbouring scale, offset reaching 10 pairs), tau / 2),
/// doubled (still capped at tau / 2) up to 8 times while the total weight is
/// zero. The cap keeps every window inside (tau/2, 3tau/2), where the
/// correction (tau/d)^2H' stays bounded.
struct KernelSpec {
    KernelFamily family = KernelFamily::epanechnikov;
    std::optional<double> bandwidth;
};

inline constexpr std::size_t kMinContributingPairs = 10;
inline constexpr int kMaxBandwidthDoublings = 8;
inline constexpr double kMaxRelativeBandwidth = 0.5;

struct LogLogPlot {
    std::vector<double> ln_tau;
    std::vector<double> ln_moment;
    std::vector<double> total_weight;
    std::vector<double> bandwidth;

    std::size_t size() const noexcept { return ln_tau.size(); }
};

/// M(tau) = sum_{j<k} w (S'_k - S'_j)^2 (tau/d)^(2H') / sum w, w = K(d - tau).
/// Throws EstimationError naming the scale if its total weight stays zero.
LogLogPlot kernel_smoothed_moments(const TimeSeries& transformed, const ScaleGrid& grid, double hurst_p,
                                   const KernelSpec& kernel);

struct LogLogFit {
    double h_slope = 0.0;  ///< half the OLS slope of ln M against ln tau
    double alpha = 0.0;    ///< OLS slope of ln(ln M - ln M_1) against ln(ln tau - ln tau_1)
    std::size_t alpha_points = 0;
};

/// Half the OLS slope (with intercept) of ln M against ln tau; needs >= 3 points.
double loglog_slope(const LogLogPlot& plot);

/// OLS slope of ln(ln M_i - ln M_1) against ln(ln tau_i - ln tau_1), over the
/// points i > 1 where both differences are positive; needs >= 3 such points.
/// Returns the slope and the number of points used.
std::pair<double, std::size_t> loglog_linearity(const LogLogPlot& plot);

/// Both regressions. Throws EstimationError with fewer than 3 usable points
/// for either fit.
LogLogFit loglog_regressions(const LogLogPlot& plot);

// ---------------------------------------------------------------------------
// Objective and estimator
// ---------------------------------------------------------------------------

struct AamConfig {
    double rho = 0.2;
    std::size_t n_scales = 15;
    KernelSpec kernel;
    /// Raw sampling interval; defaults to the first gap of the series.
    std::optional<double> step;
};

/// Everything computed on the way to f_S for one (H', theta').
struct AamEvaluation {
    ScaleGrid grid;
    LogLogPlot plot;
    LogLogFit fit;
    double objective = 0.0;  ///< |h_slope - H'| + |alpha - 1|
};

/// Lamperti transform -> scale grid -> kernel moments -> regressions.
/// Throws on any failure; see aam_objective for the non-throwing version.
AamEvaluation aam_evaluate(const TimeSeries& series, double hurst_p, double theta_p, const AamConfig& config);

/// f_S(H', theta'); +inf whenever the evaluation fails (overflow, zero weight, ...).
double aam_objective(const TimeSeries& series, double hurst_p, double theta_p, const AamConfig& config);

/// Minimizes f_S with Nelder-Mead. Requires at least two observations.
EstimationResult fit_aam(const TimeSeries& series, const AamConfig& config = {},
                         const SimplexOptions& options = {});

}  // namespace dfbm
