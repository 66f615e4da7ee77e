#include "dfbm/process.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dfbm/errors.hpp"
#include "dfbm/kernels.hpp"
#include "dfbm/rng.hpp"

namespace dfbm {

double fbm_covariance(double s, double t, double hurst, double sigma) {
    require_hurst(hurst);
    require_positive(sigma, "sigma");
    const double e = 2.0 * hurst;
    return 0.5 * sigma * sigma *
           (std::pow(std::abs(t), e) + std::pow(std::abs(s), e) - std::pow(std::abs(t - s), e));
}

double delamperti_covariance(double dt, double hurst, double theta) {
    require_hurst(hurst);
    require_theta(theta);
    return kernels::delamperti_correlation(theta * std::abs(dt), hurst);
}

Eigen::MatrixXd build_covariance_matrix(const TimeGrid& grid, const ModelParams& params, Model model) {
    require_hurst(params.hurst);
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd cov(n, n);
    if (model == Model::delampertized) {
        require_theta(params.theta);
        kernels::fill_delamperti_covariance(grid.times(), params.hurst, params.theta, cov);
        return cov;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double c = fbm_covariance(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)],
                                            params.hurst, 1.0);
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }
    return cov;
}

namespace {

bool try_llt(const Eigen::MatrixXd& a, Eigen::MatrixXd& lower) {
    Eigen::LLT<Eigen::MatrixXd> llt(a);
    if (llt.info() != Eigen::Success) {
        return false;
    }
    lower = llt.matrixL();
    for (Eigen::Index i = 0; i < lower.rows(); ++i) {
        const double d = lower(i, i);
        if (!(d > 0.0) || !std::isfinite(d)) {
            return false;
        }
    }
    return true;
}

}  // namespace

CholeskyFactor factorize_covariance(const Eigen::MatrixXd& covariance) {
    const Eigen::Index n = covariance.rows();
    if (covariance.cols() != n) {
        throw GridError("covariance matrix is not square");
    }

    std::vector<Eigen::Index> active;
    active.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (covariance(i, i) != 0.0) {
            active.push_back(i);
        }
    }
    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd reduced(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
            reduced(a, b) = covariance(active[a], active[b]);
        }
    }

    CholeskyFactor out;
    out.lower = Eigen::MatrixXd::Zero(n, n);
    if (m == 0) {
        return out;
    }

    const double scale = reduced.diagonal().cwiseAbs().maxCoeff();
    Eigen::MatrixXd lower;
    bool ok = try_llt(reduced, lower);
    double jitter = 0.0;
    for (double eps = kFirstJitter; !ok && eps <= kMaxJitter * (1.0 + 1e-9); eps *= 10.0) {
        Eigen::MatrixXd shifted = reduced;
        shifted.diagonal().array() += eps * scale;
        ok = try_llt(shifted, lower);
        jitter = eps;
    }
    if (!ok) {
        throw ConditioningError("covariance factorization failed with diagonal jitter up to " +
                                std::to_string(kMaxJitter));
    }
    out.jitter = jitter;
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            out.lower(active[a], active[b]) = lower(a, b);
        }
    }
    return out;
}

PathSampler::PathSampler(TimeGrid grid, const ModelParams& params, Model model)
    : grid_(std::move(grid)), params_(params) {
    params_.validate();
    factor_ = factorize_covariance(build_covariance_matrix(grid_, params_, model));
}

TimeSeries PathSampler::sample(std::uint64_t seed) const {
    const auto n = static_cast<Eigen::Index>(grid_.size());
    Eigen::VectorXd g(n);
    GaussianStream normals(seed);
    normals.fill(std::span<double>(g.data(), static_cast<std::size_t>(n)));
    const Eigen::VectorXd y = factor_.lower.triangularView<Eigen::Lower>() * g;
    std::vector<double> values(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        values[static_cast<std::size_t>(i)] = params_.mu + params_.sigma * y(i);
    }
    return TimeSeries(grid_, std::move(values));
}

TimeSeries sample_path(const TimeGrid& grid, const ModelParams& params, Model model, std::uint64_t seed) {
    return PathSampler(grid, params, model).sample(seed);
}

TimeSeries add_white_noise(const TimeSeries& series, double noise_sd, std::uint64_t seed) {
    if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) {
        throw DomainError("noise standard deviation must be non-negative, got " + std::to_string(noise_sd));
    }
    TimeSeries out = series;
    if (noise_sd == 0.0) {
        return out;
    }
    GaussianStream normals(seed);
    for (double& v : out.values) {
        v += noise_sd * normals.next();
    }
    return out;
}

}  // namespace dfbm
