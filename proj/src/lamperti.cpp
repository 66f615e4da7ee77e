#include "dfbm/lamperti.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dfbm/errors.hpp"

namespace dfbm {

TimeSeries lamperti_direct_series(const TimeSeries& series, double hurst_p, double theta_p) {
    require_hurst(hurst_p);
    require_theta(theta_p);
    const std::size_t n = series.size();
    std::vector<double> t(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = theta_p * series.grid[i];
        if (std::abs(a) > kMaxLampertiExponent) {
            throw RangeError("exp(theta' * t) out of range", i);
        }
        t[i] = std::exp(a);
        s[i] = std::exp(hurst_p * a) * series.values[i];
    }
    return TimeSeries(TimeGrid(std::move(t)), std::move(s));
}

TimeSeries lamperti_inverse_series(const TimeSeries& series, double hurst, double theta) {
    require_hurst(hurst);
    require_theta(theta);
    const std::size_t n = series.size();
    std::vector<double> t(n);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double ti = series.grid[i];
        if (!(ti > 0.0)) {
            throw DomainError("inverse Lamperti transform needs positive times; time " + std::to_string(i) +
                              " is " + std::to_string(ti));
        }
        const double lt = std::log(ti);
        t[i] = lt / theta;
        s[i] = std::exp(-hurst * lt) * series.values[i];
    }
    return TimeSeries(TimeGrid(std::move(t)), std::move(s));
}

double composite_exponent(double hurst, double theta, double hurst_p, double theta_p) {
    return hurst_p - (theta / theta_p) * hurst;
}

TimeMap composed_process_time_map(double t, double hurst, double theta, double hurst_p, double theta_p) {
    require_hurst(hurst);
    require_hurst(hurst_p);
    require_theta(theta);
    require_theta(theta_p);
    if (!(t > 0.0)) {
        throw DomainError("time map is defined for t > 0 only");
    }
    const double h = composite_exponent(hurst, theta, hurst_p, theta_p);
    return {std::pow(t, h), std::pow(t, theta / theta_p)};
}

double composed_increment_variance(double t, double tau, double hurst, double theta, double hurst_p,
                                   double theta_p, double sigma) {
    require_hurst(hurst);
    require_hurst(hurst_p);
    require_theta(theta);
    require_theta(theta_p);
    require_positive(sigma, "sigma");
    if (!(t >= 0.0) || !(tau > 0.0)) {
        throw DomainError("increment variance needs t >= 0 and tau > 0");
    }
    const double s2 = sigma * sigma;
    if (t == 0.0) {
        return s2 * std::pow(tau, 2.0 * hurst_p);
    }
    const double r = theta / theta_p;
    const double h = hurst_p - r * hurst;
    const double u = t + tau;
    const double log_ratio = std::log1p(tau / t);
    if (r * log_ratio > std::log(2.0)) {
        // x = (t/u)^r <= 1/2: u^2H' + t^2H' + (ut)^h u^2rH ((1 - x)^2H - 1 - x^2H).
        // The other form cancels two terms of size (u/t)^-h here.
        const double x = std::exp(-r * log_ratio);
        const double bracket = std::expm1(2.0 * hurst * std::log1p(-x)) - std::pow(x, 2.0 * hurst);
        const double cross = std::exp(h * std::log(u * t) + 2.0 * r * hurst * std::log(u));
        return s2 * (std::pow(u, 2.0 * hurst_p) + std::pow(t, 2.0 * hurst_p) + cross * bracket);
    }
    // Around L = ln(1 + tau/t), so that small tau/t loses no precision:
    // u^2H' (1 - (t/u)^h) + t^2H' (1 - (u/t)^h) + (ut)^h |u^r - t^r|^2H,  u = t + tau.
    const double first = -std::pow(u, 2.0 * hurst_p) * std::expm1(-h * log_ratio);
    const double second = -std::pow(t, 2.0 * hurst_p) * std::expm1(h * log_ratio);
    const double gap = std::pow(t, r) * std::expm1(r * log_ratio);
    const double third = std::pow(u * t, h) * std::pow(gap, 2.0 * hurst);
    return s2 * (first + second + third);
}

}  // namespace dfbm
