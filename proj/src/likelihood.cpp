#include "dfbm/likelihood.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "dfbm/errors.hpp"
#include "dfbm/process.hpp"

namespace dfbm {

namespace {

struct FactorTerms {
    double half_log_det_inverse;  ///< -sum ln L_ii
    double quadratic;             ///< (S - mu)' Sigma^-1 (S - mu)
    double jitter;
};

FactorTerms factor_terms(const TimeSeries& series, double hurst, double theta, double mu) {
    require_hurst(hurst);
    require_theta(theta);
    const ModelParams params{hurst, theta, 1.0, 0.0};
    const CholeskyFactor chol = factorize_covariance(build_covariance_matrix(series.grid, params, Model::delampertized));

    const auto n = static_cast<Eigen::Index>(series.size());
    Eigen::VectorXd centered(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        centered(i) = series.values[static_cast<std::size_t>(i)] - mu;
    }
    chol.lower.triangularView<Eigen::Lower>().solveInPlace(centered);

    return {-chol.lower.diagonal().array().log().sum(), centered.squaredNorm(), chol.jitter};
}

}  // namespace

LikelihoodValue log_likelihood(const TimeSeries& series, double hurst, double theta) {
    const FactorTerms t = factor_terms(series, hurst, theta, 0.0);
    const double n = static_cast<double>(series.size());
    return {t.half_log_det_inverse - 0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * t.quadratic, t.jitter};
}

LikelihoodValue log_likelihood_affine(const TimeSeries& series, double hurst, double theta, double mu,
                                      double sigma) {
    require_positive(sigma, "sigma");
    const FactorTerms t = factor_terms(series, hurst, theta, mu);
    const double n = static_cast<double>(series.size());
    const double s2 = sigma * sigma;
    return {t.half_log_det_inverse - 0.5 * n * std::log(2.0 * std::numbers::pi * s2) - 0.5 * t.quadratic / s2,
            t.jitter};
}

EstimationResult fit_ml(const TimeSeries& series, const SimplexOptions& options) {
    if (series.size() < 2) {
        throw EstimationError("ML estimation needs at least two observations");
    }
    const auto start = std::chrono::steady_clock::now();
    const Objective objective = [&series](ParamPoint p) {
        try {
            return log_likelihood(series, p.hurst, p.theta).value;
        } catch (const ConditioningError&) {
            return -std::numeric_limits<double>::infinity();
        } catch (const DomainError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };
    const SimplexResult r = nelder_mead(objective, Direction::maximize, options);
    const auto stop = std::chrono::steady_clock::now();

    EstimationResult out;
    out.method = Method::ml;
    out.hurst = r.best.hurst;
    out.theta = r.best.theta;
    out.objective = r.value;
    out.iterations = r.iterations;
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.wall_seconds = std::chrono::duration<double>(stop - start).count();
    return out;
}

}  // namespace dfbm
