#pragma once

#include "dfbm/types.hpp"

namespace dfbm {

/// Largest |theta' * t| accepted by the direct transform before exp() is
/// considered to overflow (or underflow to a non-increasing grid).
inline constexpr double kMaxLampertiExponent = 700.0;

/// Direct Lamperti transform with time contraction:
/// T'_i = exp(theta' T_i), S'_i = exp(theta' H' T_i) S_i.
/// Throws RangeError naming the first index with |theta' T_i| > 700.
TimeSeries lamperti_direct_series(const TimeSeries& series, double hurst_p, double theta_p);

/// Inverse Lamperti transform: times ln(T_i) / theta, values T_i^-H S_i.
/// Throws DomainError if any time is not strictly positive.
TimeSeries lamperti_inverse_series(const TimeSeries& series, double hurst, double theta);

/// h = H' - (theta / theta') H, the self-similarity exponent left on Z after
/// re-lampertizing a delampertized fBm with the wrong parameters.
double composite_exponent(double hurst, double theta, double hurst_p, double theta_p);

struct TimeMap {
    double scale;  ///< t^h
    double time;   ///< t^(theta / theta')
};

/// Z_t = t^h X_{t^(theta/theta')} for Z = L_{H',theta'} L^-1_{H,theta} X.
/// Throws DomainError for t <= 0; Z_0 = 0 is the caller's extension.
TimeMap composed_process_time_map(double t, double hurst, double theta, double hurst_p, double theta_p);

/// E[(Z_{t+tau} - Z_t)^2] for the composed process, sigma^2 times
/// (t+tau)^2H' + t^2H' - ((t+tau)t)^h ((t+tau)^(2Hr) + t^(2Hr) - |(t+tau)^r - t^r|^2H)
/// with r = theta / theta'. At t = 0 this is sigma^2 tau^2H' (Z_0 = 0).
double composed_increment_variance(double t, double tau, double hurst, double theta, double hurst_p,
                                   double theta_p, double sigma);

}  // namespace dfbm
