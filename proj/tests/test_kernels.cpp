#include <cmath>
#include <cstring>
#include <random>

#include <gtest/gtest.h>
#include <omp.h>

#include "dfbm/kernels.hpp"

using namespace dfbm;

namespace {

std::vector<double> random_times(std::mt19937_64& rng, std::size_t n) {
    std::exponential_distribution<double> gap(1.0);
    std::vector<double> t{1.0};
    while (t.size() < n) {
        t.push_back(t.back() * (1.0 + 0.02 * gap(rng)) + 1e-3 * gap(rng));
    }
    return t;
}

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof a) == 0;
}

class ThreadCount : public ::testing::TestWithParam<int> {
protected:
    void SetUp() override {
        saved_ = omp_get_max_threads();
        omp_set_num_threads(GetParam());
    }
    void TearDown() override { omp_set_num_threads(saved_); }

private:
    int saved_ = 1;
};

}  // namespace

TEST(KernelWeight, SupportSymmetryAndShape) {
    for (auto fam : {KernelFamily::epanechnikov, KernelFamily::truncated_gaussian, KernelFamily::box}) {
        EXPECT_EQ(kernel_weight(fam, 1.0, 1.0), 0.0);
        EXPECT_EQ(kernel_weight(fam, -1.5, 1.0), 0.0);
        EXPECT_GT(kernel_weight(fam, 0.0, 1.0), 0.0);
        EXPECT_GT(kernel_weight(fam, 0.99, 1.0), 0.0);
        EXPECT_EQ(kernel_weight(fam, 0.3, 1.0), kernel_weight(fam, -0.3, 1.0));
    }
    EXPECT_GT(kernel_weight(KernelFamily::epanechnikov, 0.1, 1.0), kernel_weight(KernelFamily::epanechnikov, 0.5, 1.0));
    EXPECT_EQ(kernel_weight(KernelFamily::box, 0.1, 1.0), kernel_weight(KernelFamily::box, 0.9, 1.0));
}

TEST_P(ThreadCount, CovarianceFillIsBitwiseSerial) {
    std::mt19937_64 rng(1);
    for (std::size_t n : {1u, 7u, 64u, 301u}) {
        const auto t = random_times(rng, n);
        Eigen::MatrixXd a;
        Eigen::MatrixXd b;
        kernels::fill_delamperti_covariance(t, 0.65, 3.0, a);
        kernels::serial::fill_delamperti_covariance(t, 0.65, 3.0, b);
        ASSERT_EQ(a.rows(), b.rows());
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            ASSERT_TRUE(same_bits(a.data()[i], b.data()[i]));
        }
    }
}

TEST_P(ThreadCount, PairMomentsAreBitwiseSerial) {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> val(0.0, 1.0);
    std::uniform_real_distribution<double> rel(0.05, 0.7);
    for (std::size_t n : {2u, 30u, 400u}) {
        const auto t = random_times(rng, n);
        std::vector<double> v(n);
        for (double& x : v) {
            x = val(rng);
        }
        const double span = t.back() - t.front();
        std::vector<double> scales;
        std::vector<double> bw;
        for (int i = 0; i < 12; ++i) {
            scales.push_back(span * std::pow(10.0, -3.0 + 3.0 * i / 11.0));
            bw.push_back(rel(rng) * scales.back());
        }
        for (auto fam : {KernelFamily::epanechnikov, KernelFamily::truncated_gaussian, KernelFamily::box}) {
            const auto a = kernels::smoothed_pair_moments(t, v, scales, bw, fam, 0.6);
            const auto b = kernels::serial::smoothed_pair_moments(t, v, scales, bw, fam, 0.6);
            ASSERT_EQ(a.size(), b.size());
            for (std::size_t i = 0; i < a.size(); ++i) {
                EXPECT_TRUE(same_bits(a[i].weighted_sum, b[i].weighted_sum)) << "n=" << n << " scale " << i;
                EXPECT_TRUE(same_bits(a[i].total_weight, b[i].total_weight));
                EXPECT_EQ(a[i].pairs, b[i].pairs);
            }
        }
    }
}

TEST_P(ThreadCount, NearestPairOffsetsAreBitwiseSerial) {
    std::mt19937_64 rng(3);
    for (std::size_t n : {2u, 5u, 50u, 500u}) {
        const auto t = random_times(rng, n);
        const double span = t.back() - t.front();
        std::vector<double> scales;
        for (int i = 0; i < 10; ++i) {
            scales.push_back(span * std::pow(10.0, -3.0 + 3.3 * i / 9.0));
        }
        for (std::size_t count : {1u, 10u, 40u}) {
            const auto a = kernels::kth_nearest_pair_offset(t, scales, count);
            const auto b = kernels::serial::kth_nearest_pair_offset(t, scales, count);
            for (std::size_t i = 0; i < a.size(); ++i) {
                EXPECT_TRUE(same_bits(a[i], b[i])) << "n=" << n << " count=" << count << " scale " << i;
            }
            if (n * (n - 1) / 2 < count) {
                EXPECT_EQ(a.front(), INFINITY);
            }
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Threads, ThreadCount, ::testing::Values(1, 2, 4));
