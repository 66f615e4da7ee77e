#include "dfbm/aam.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "dfbm/errors.hpp"
#include "dfbm/lamperti.hpp"

namespace dfbm {

double absolute_moment_constant(double sigma, double k) {
    require_positive(sigma, "sigma");
    require_positive(k, "moment order k");
    return std::exp(0.5 * k * std::numbers::ln2 + std::lgamma(0.5 * (k + 1.0)) - std::lgamma(0.5)) *
           std::pow(sigma, k);
}

double empirical_absolute_moment(const TimeSeries& series, double k) {
    require_positive(k, "moment order k");
    if (series.size() < 2) {
        throw EstimationError("absolute moment needs at least two observations");
    }
    double sum = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        sum += std::pow(std::abs(series.values[i] - series.values[i - 1]), k);
    }
    return sum / static_cast<double>(series.size() - 1);
}

namespace {

void check_query(const MomentQuery& q) {
    require_positive(q.k, "moment order k");
    require_hurst(q.hurst);
    require_hurst(q.hurst_p);
    require_theta(q.theta);
    require_theta(q.theta_p);
    require_positive(q.sigma, "sigma");
    if (q.n == 0) {
        throw DomainError("number of increments must be positive");
    }
    if (!(q.t_a > 0.0 && q.t_b > q.t_a)) {
        throw DomainError("moment window needs t_b > t_a > 0");
    }
}

}  // namespace

double theoretical_moment(const MomentQuery& q) {
    check_query(q);
    const double width = q.t_b - q.t_a;
    const double n = static_cast<double>(q.n);
    double sum = 0.0;
    for (std::size_t i = 0; i < q.n; ++i) {
        const double t = q.t_a + width * static_cast<double>(i) / n;
        const double t_next = q.t_a + width * static_cast<double>(i + 1) / n;
        const double var = composed_increment_variance(t, t_next - t, q.hurst, q.theta, q.hurst_p, q.theta_p, 1.0);
        sum += std::pow(var, 0.5 * q.k);
    }
    return absolute_moment_constant(q.sigma, q.k) * sum / n;
}

double asymptotic_moment(const MomentQuery& q) {
    check_query(q);
    const double e = q.k * (q.hurst_p - q.hurst) + 1.0;
    if (std::abs(e) < 1e-12) {
        throw DomainError("asymptotic moment is singular at k (H' - H) + 1 = 0");
    }
    const double kh = q.k * q.hurst;
    const double width = q.t_b - q.t_a;
    return absolute_moment_constant(q.sigma, q.k) * (std::pow(q.t_b, e) - std::pow(q.t_a, e)) / e *
           std::pow(q.theta / q.theta_p, kh) * std::pow(width, kh - 1.0) *
           std::pow(static_cast<double>(q.n), -kh);
}

ScaleGrid build_scale_grid(double theta_p, double step, std::size_t n_obs, double rho, std::size_t n_scales) {
    require_theta(theta_p);
    require_positive(step, "step");
    if (!(rho > 0.0 && rho < 1.0)) {
        throw DomainError("rho must lie in (0, 1)");
    }
    if (n_scales < 3) {
        throw DomainError("at least 3 scales are needed");
    }
    if (n_obs < 2) {
        throw DomainError("at least 2 observations are needed");
    }
    const double low_arg = theta_p * step;
    const double high_arg = theta_p * step * rho * static_cast<double>(n_obs);
    if (high_arg > kMaxLampertiExponent) {
        throw RangeError("largest scale overflows", n_scales - 1);
    }
    const double low = std::expm1(low_arg);
    const double high = std::expm1(high_arg);
    if (!(low > 0.0) || !(high > low * (1.0 + 1e-9))) {
        throw EstimationError("scale grid collapses: theta' * step * rho * N is too small");
    }

    ScaleGrid grid;
    grid.rho = rho;
    grid.step = step;
    grid.n_obs = n_obs;
    grid.scales.resize(n_scales);
    const double lo = std::log(low);
    const double span = std::log(high) - lo;
    grid.scales.front() = low;
    for (std::size_t i = 1; i + 1 < n_scales; ++i) {
        grid.scales[i] = std::exp(lo + span * static_cast<double>(i) / static_cast<double>(n_scales - 1));
    }
    grid.scales.back() = high;
    return grid;
}

namespace {

std::vector<double> auto_bandwidths(std::span<const double> times, const std::vector<double>& scales) {
    const std::size_t m = scales.size();
    const std::size_t n = times.size();
    const std::size_t pair_count = n * (n - 1) / 2;
    const std::size_t need = std::min(kMinContributingPairs, pair_count);
    const std::vector<double> kth = kernels::kth_nearest_pair_offset(times, scales, need);

    std::vector<double> out(m);
    for (std::size_t i = 0; i < m; ++i) {
        double spacing = 0.0;
        if (i > 0) {
            spacing = std::max(spacing, scales[i] - scales[i - 1]);
        }
        if (i + 1 < m) {
            spacing = std::max(spacing, scales[i + 1] - scales[i]);
        }
        // The kernel vanishes on the edge of its support; step just past it.
        const double reach = kth[i] * (1.0 + 1e-9) + std::numeric_limits<double>::min();
        out[i] = std::min(std::max(spacing, reach), kMaxRelativeBandwidth * scales[i]);
    }
    return out;
}

}  // namespace

LogLogPlot kernel_smoothed_moments(const TimeSeries& transformed, const ScaleGrid& grid, double hurst_p,
                                   const KernelSpec& kernel) {
    require_hurst(hurst_p);
    if (transformed.size() < 2) {
        throw EstimationError("kernel moments need at least two observations");
    }
    if (grid.scales.empty()) {
        throw EstimationError("empty scale grid");
    }
    const std::span<const double> times = transformed.grid.times();
    const std::span<const double> values = transformed.values;

    std::vector<double> bandwidth;
    if (kernel.bandwidth) {
        require_positive(*kernel.bandwidth, "bandwidth");
        bandwidth.assign(grid.size(), *kernel.bandwidth);
    } else {
        bandwidth = auto_bandwidths(times, grid.scales);
    }

    std::vector<PairMoment> moments =
        kernels::smoothed_pair_moments(times, values, grid.scales, bandwidth, kernel.family, hurst_p);

    for (int round = 0; round < kMaxBandwidthDoublings; ++round) {
        std::vector<std::size_t> empty;
        for (std::size_t i = 0; i < moments.size(); ++i) {
            if (!(moments[i].total_weight > 0.0)) {
                empty.push_back(i);
            }
        }
        if (empty.empty()) {
            break;
        }
        std::vector<double> sub_scales;
        std::vector<double> sub_bw;
        for (std::size_t i : empty) {
            bandwidth[i] *= 2.0;
            if (!kernel.bandwidth) {
                bandwidth[i] = std::min(bandwidth[i], kMaxRelativeBandwidth * grid.scales[i]);
            }
            sub_scales.push_back(grid.scales[i]);
            sub_bw.push_back(bandwidth[i]);
        }
        const std::vector<PairMoment> redone =
            kernels::smoothed_pair_moments(times, values, sub_scales, sub_bw, kernel.family, hurst_p);
        for (std::size_t e = 0; e < empty.size(); ++e) {
            moments[empty[e]] = redone[e];
        }
    }

    LogLogPlot plot;
    plot.ln_tau.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(moments[i].total_weight > 0.0)) {
            throw EstimationError("total kernel weight is zero at scale " + std::to_string(grid.scales[i]));
        }
        plot.ln_tau.push_back(std::log(grid.scales[i]));
        plot.ln_moment.push_back(std::log(moments[i].weighted_sum / moments[i].total_weight));
        plot.total_weight.push_back(moments[i].total_weight);
        plot.bandwidth.push_back(bandwidth[i]);
    }
    return plot;
}

namespace {

// OLS slope of y on x with intercept.
double ols_slope(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) {
        throw EstimationError("regression abscissae are all equal");
    }
    return sxy / sxx;
}

void check_plot(const LogLogPlot& plot) {
    if (plot.ln_moment.size() != plot.ln_tau.size()) {
        throw EstimationError("log-log plot columns differ in length");
    }
    for (std::size_t i = 0; i < plot.size(); ++i) {
        if (!std::isfinite(plot.ln_tau[i]) || !std::isfinite(plot.ln_moment[i])) {
            throw EstimationError("log-log plot has a non-finite point at index " + std::to_string(i));
        }
    }
}

}  // namespace

double loglog_slope(const LogLogPlot& plot) {
    check_plot(plot);
    if (plot.size() < 3) {
        throw EstimationError("slope regression needs at least 3 points");
    }
    return 0.5 * ols_slope(plot.ln_tau, plot.ln_moment);
}

std::pair<double, std::size_t> loglog_linearity(const LogLogPlot& plot) {
    check_plot(plot);
    std::vector<double> x;
    std::vector<double> y;
    for (std::size_t i = 1; i < plot.size(); ++i) {
        const double dx = plot.ln_tau[i] - plot.ln_tau[0];
        const double dy = plot.ln_moment[i] - plot.ln_moment[0];
        if (dx > 0.0 && dy > 0.0) {
            x.push_back(std::log(dx));
            y.push_back(std::log(dy));
        }
    }
    if (x.size() < 3) {
        throw EstimationError("linearity regression has only " + std::to_string(x.size()) +
                              " usable points (needs 3)");
    }
    return {ols_slope(x, y), x.size()};
}

LogLogFit loglog_regressions(const LogLogPlot& plot) {
    LogLogFit fit;
    fit.h_slope = loglog_slope(plot);
    const auto [alpha, used] = loglog_linearity(plot);
    fit.alpha = alpha;
    fit.alpha_points = used;
    return fit;
}

AamEvaluation aam_evaluate(const TimeSeries& series, double hurst_p, double theta_p, const AamConfig& config) {
    if (series.size() < 2) {
        throw EstimationError("AAM needs at least two observations");
    }
    const TimeSeries transformed = lamperti_direct_series(series, hurst_p, theta_p);
    const double step = config.step ? *config.step : series.grid[1] - series.grid[0];

    AamEvaluation ev;
    ev.grid = build_scale_grid(theta_p, step, series.size(), config.rho, config.n_scales);
    ev.plot = kernel_smoothed_moments(transformed, ev.grid, hurst_p, config.kernel);
    ev.fit = loglog_regressions(ev.plot);
    ev.objective = std::abs(ev.fit.h_slope - hurst_p) + std::abs(ev.fit.alpha - 1.0);
    return ev;
}

double aam_objective(const TimeSeries& series, double hurst_p, double theta_p, const AamConfig& config) {
    try {
        const double f = aam_evaluate(series, hurst_p, theta_p, config).objective;
        return std::isfinite(f) ? f : std::numeric_limits<double>::infinity();
    } catch (const Error&) {
        return std::numeric_limits<double>::infinity();
    }
}

EstimationResult fit_aam(const TimeSeries& series, const AamConfig& config, const SimplexOptions& options) {
    if (series.size() < 2) {
        throw EstimationError("AAM estimation needs at least two observations");
    }
    const auto start = std::chrono::steady_clock::now();
    const Objective objective = [&](ParamPoint p) { return aam_objective(series, p.hurst, p.theta, config); };
    const SimplexResult r = nelder_mead(objective, Direction::minimize, options);
    const auto stop = std::chrono::steady_clock::now();

    EstimationResult out;
    out.method = Method::aam;
    out.hurst = r.best.hurst;
    out.theta = r.best.theta;
    out.objective = r.value;
    out.iterations = r.iterations;
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.wall_seconds = std::chrono::duration<double>(stop - start).count();
    try {
        const AamEvaluation ev = aam_evaluate(series, r.best.hurst, r.best.theta, config);
        out.h_slope = ev.fit.h_slope;
        out.alpha = ev.fit.alpha;
    } catch (const Error&) {
        // Optimum sits where the diagnostics are undefined; leave them absent.
    }
    return out;
}

}  // namespace dfbm
