#pragma once

// Hot loops of the library. Each kernel has an OpenMP version, used by the
// estimators, and a plain serial version kept as the reference the tests
// and the benchmark compare against. Both versions return bitwise-identical
// results: parallelism is only ever across independent outputs, and every
// reduction runs in a fixed order inside one thread.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace dfbm {

enum class KernelFamily { epanechnikov, truncated_gaussian, box };

/// K(u) for a kernel of half-width `bandwidth`; zero for |u| >= bandwidth.
/// The truncated Gaussian has standard deviation bandwidth / 3.
double kernel_weight(KernelFamily family, double u, double bandwidth) noexcept;

/// Weighted sums behind one kernel-smoothed moment.
struct PairMoment {
    double weighted_sum = 0.0;  ///< sum of w (S_k - S_j)^2 (tau/d)^(2H)
    double total_weight = 0.0;  ///< W = sum of w
    std::size_t pairs = 0;      ///< pairs with w > 0
};

namespace kernels {

/// Delampertized correlation at u = theta |dt| >= 0, no argument checks.
double delamperti_correlation(double u, double hurst) noexcept;

/// Fills the symmetric delampertized correlation matrix for `times`.
void fill_delamperti_covariance(std::span<const double> times, double hurst, double theta,
                                Eigen::MatrixXd& out);

/// Kernel-smoothed second moments with fractal correction, one entry per scale.
/// Pairs (j < k) outside every kernel window are skipped via binary search on
/// the sorted times; surviving pairs are summed in (j, k) order.
std::vector<PairMoment> smoothed_pair_moments(std::span<const double> times,
                                              std::span<const double> values,
                                              std::span<const double> scales,
                                              std::span<const double> bandwidths,
                                              KernelFamily family, double hurst);

/// For each scale tau, the `count`-th smallest |d - tau| over all pair
/// distances d = t_k - t_j (j < k); +inf when fewer than `count` pairs exist.
std::vector<double> kth_nearest_pair_offset(std::span<const double> times,
                                            std::span<const double> scales, std::size_t count);

}  // namespace kernels

namespace kernels::serial {

void fill_delamperti_covariance(std::span<const double> times, double hurst, double theta,
                                Eigen::MatrixXd& out);

/// Full O(N^2) double loop for every scale, no pruning.
std::vector<PairMoment> smoothed_pair_moments(std::span<const double> times,
                                              std::span<const double> values,
                                              std::span<const double> scales,
                                              std::span<const double> bandwidths,
                                              KernelFamily family, double hurst);

std::vector<double> kth_nearest_pair_offset(std::span<const double> times,
                                            std::span<const double> scales, std::size_t count);

}  // namespace kernels::serial

}  // namespace dfbm
