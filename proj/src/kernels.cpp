#include "dfbm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace dfbm {

double kernel_weight(KernelFamily family, double u, double bandwidth) noexcept {
    const double z = u / bandwidth;
    if (!(std::abs(z) < 1.0)) {
        return 0.0;
    }
    switch (family) {
        case KernelFamily::epanechnikov:
            return 0.75 * (1.0 - z * z) / bandwidth;
        case KernelFamily::box:
            return 0.5 / bandwidth;
        case KernelFamily::truncated_gaussian: {
            const double sd = bandwidth / 3.0;
            return std::exp(-4.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
        }
    }
    return 0.0;
}

namespace kernels {

double delamperti_correlation(double u, double hurst) noexcept {
    // cosh(Hu) - 2^(2H-1) sinh(u/2)^(2H)
    //   = e^{-Hu}/2 + e^{Hu}/2 * (1 - (1 - e^{-u})^{2H})
    if (u > 40.0) {
        // 1 - (1 - e^{-u})^{2H} = 2H e^{-u} + O(e^{-2u})
        return 0.5 * std::exp(-hurst * u) + hurst * std::exp((hurst - 1.0) * u);
    }
    const double one_minus_pow = -std::expm1(2.0 * hurst * std::log1p(-std::exp(-u)));
    return 0.5 * std::exp(-hurst * u) + 0.5 * std::exp(hurst * u) * one_minus_pow;
}

namespace {

void fill_row(std::span<const double> times, double hurst, double theta, Eigen::MatrixXd& out,
              Eigen::Index i) {
    for (Eigen::Index j = 0; j < i; ++j) {
        const double u = theta * (times[static_cast<std::size_t>(i)] - times[static_cast<std::size_t>(j)]);
        const double c = delamperti_correlation(std::abs(u), hurst);
        out(i, j) = c;
        out(j, i) = c;
    }
    out(i, i) = 1.0;
}

// Accumulates pair (j, k) into `acc` if it falls inside the kernel window.
inline void accumulate_pair(std::span<const double> times, std::span<const double> values, std::size_t j,
                            std::size_t k, double tau, double bandwidth, KernelFamily family,
                            double two_h, PairMoment& acc) {
    const double d = times[k] - times[j];
    const double w = kernel_weight(family, d - tau, bandwidth);
    if (w > 0.0) {
        const double ds = values[k] - values[j];
        acc.weighted_sum += w * ds * ds * std::pow(tau / d, two_h);
        acc.total_weight += w;
        ++acc.pairs;
    }
}

PairMoment pruned_scale_moment(std::span<const double> times, std::span<const double> values, double tau,
                               double bandwidth, KernelFamily family, double two_h) {
    PairMoment acc;
    const std::size_t n = times.size();
    const auto first = times.begin();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double tj = times[j];
        // Widened by a few ulps; the exact window test is accumulate_pair's.
        const double margin = 8.0 * std::numeric_limits<double>::epsilon() * (std::abs(tj) + tau + bandwidth);
        const double lo = tj + tau - bandwidth - margin;
        const double hi = tj + tau + bandwidth + margin;
        if (lo > times[n - 1]) {
            break;
        }
        const auto k_begin = std::lower_bound(first + static_cast<std::ptrdiff_t>(j) + 1, times.end(), lo);
        const auto k_end = std::upper_bound(k_begin, times.end(), hi);
        for (auto it = k_begin; it != k_end; ++it) {
            const auto k = static_cast<std::size_t>(it - first);
            accumulate_pair(times, values, j, k, tau, bandwidth, family, two_h, acc);
        }
    }
    return acc;
}

double kth_offset_for_scale(std::span<const double> times, double tau, std::size_t count) {
    if (count == 0) {
        return 0.0;
    }
    std::priority_queue<double> heap;  // the `count` smallest offsets seen so far
    auto offer = [&](double off) {
        if (heap.size() < count) {
            heap.push(off);
            return true;
        }
        if (off < heap.top()) {
            heap.pop();
            heap.push(off);
            return true;
        }
        return false;
    };
    const std::size_t n = times.size();
    const auto first = times.begin();
    for (std::size_t j = 0; j + 1 < n; ++j) {
        const double tj = times[j];
        const auto pos = static_cast<std::size_t>(
            std::lower_bound(first + static_cast<std::ptrdiff_t>(j) + 1, times.end(), tj + tau) - first);
        // Offsets grow monotonically walking away from `pos` in either direction.
        for (std::size_t k = pos, taken = 0; k < n && taken < count; ++k, ++taken) {
            if (!offer(std::abs((times[k] - tj) - tau))) {
                break;
            }
        }
        for (std::size_t k = pos, taken = 0; k > j + 1 && taken < count; ++taken) {
            --k;
            if (!offer(std::abs((times[k] - tj) - tau))) {
                break;
            }
        }
    }
    if (heap.size() < count) {
        return std::numeric_limits<double>::infinity();
    }
    return heap.top();
}

}  // namespace

void fill_delamperti_covariance(std::span<const double> times, double hurst, double theta,
                                Eigen::MatrixXd& out) {
    const auto n = static_cast<Eigen::Index>(times.size());
    out.resize(n, n);
#pragma omp parallel for schedule(dynamic, 16)
    for (Eigen::Index i = 0; i < n; ++i) {
        fill_row(times, hurst, theta, out, i);
    }
}

std::vector<PairMoment> smoothed_pair_moments(std::span<const double> times, std::span<const double> values,
                                              std::span<const double> scales,
                                              std::span<const double> bandwidths, KernelFamily family,
                                              double hurst) {
    const auto m = static_cast<std::ptrdiff_t>(scales.size());
    std::vector<PairMoment> out(scales.size());
    const double two_h = 2.0 * hurst;
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t s = 0; s < m; ++s) {
        const auto i = static_cast<std::size_t>(s);
        out[i] = pruned_scale_moment(times, values, scales[i], bandwidths[i], family, two_h);
    }
    return out;
}

std::vector<double> kth_nearest_pair_offset(std::span<const double> times, std::span<const double> scales,
                                            std::size_t count) {
    const auto m = static_cast<std::ptrdiff_t>(scales.size());
    std::vector<double> out(scales.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t s = 0; s < m; ++s) {
        const auto i = static_cast<std::size_t>(s);
        out[i] = kth_offset_for_scale(times, scales[i], count);
    }
    return out;
}

}  // namespace kernels

namespace kernels::serial {

void fill_delamperti_covariance(std::span<const double> times, double hurst, double theta,
                                Eigen::MatrixXd& out) {
    const auto n = static_cast<Eigen::Index>(times.size());
    out.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        fill_row(times, hurst, theta, out, i);
    }
}

std::vector<PairMoment> smoothed_pair_moments(std::span<const double> times, std::span<const double> values,
                                              std::span<const double> scales,
                                              std::span<const double> bandwidths, KernelFamily family,
                                              double hurst) {
    std::vector<PairMoment> out(scales.size());
    const double two_h = 2.0 * hurst;
    const std::size_t n = times.size();
    for (std::size_t s = 0; s < scales.size(); ++s) {
        for (std::size_t j = 0; j + 1 < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                accumulate_pair(times, values, j, k, scales[s], bandwidths[s], family, two_h, out[s]);
            }
        }
    }
    return out;
}

std::vector<double> kth_nearest_pair_offset(std::span<const double> times, std::span<const double> scales,
                                            std::size_t count) {
    std::vector<double> out(scales.size());
    const std::size_t n = times.size();
    for (std::size_t s = 0; s < scales.size(); ++s) {
        std::vector<double> offsets;
        offsets.reserve(n * (n - 1) / 2);
        for (std::size_t j = 0; j + 1 < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                offsets.push_back(std::abs((times[k] - times[j]) - scales[s]));
            }
        }
        if (count == 0) {
            out[s] = 0.0;
        } else if (offsets.size() < count) {
            out[s] = std::numeric_limits<double>::infinity();
        } else {
            std::nth_element(offsets.begin(), offsets.begin() + static_cast<std::ptrdiff_t>(count - 1),
                             offsets.end());
            out[s] = offsets[count - 1];
        }
    }
    return out;
}

}  // namespace kernels::serial

}  // namespace dfbm
