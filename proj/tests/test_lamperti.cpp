#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dfbm/errors.hpp"
#include "dfbm/lamperti.hpp"
#include "dfbm/process.hpp"
#include "dfbm/rng.hpp"
#include "oracles.hpp"

using namespace dfbm;

namespace {

TimeSeries random_series(std::mt19937_64& rng, std::size_t n, double t0) {
    std::uniform_real_distribution<double> gap(1e-3, 0.3);
    std::normal_distribution<double> val(0.0, 2.0);
    std::vector<double> t{t0};
    std::vector<double> v{val(rng)};
    while (t.size() < n) {
        t.push_back(t.back() + gap(rng));
        v.push_back(val(rng));
    }
    return TimeSeries(TimeGrid(std::move(t)), std::move(v));
}

void expect_rel_near(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NEAR(a[i], b[i], tol * std::max(1.0, std::abs(b[i]))) << "index " << i;
    }
}

}  // namespace

TEST(LampertiDirect, Examples) {
    const TimeSeries s(TimeGrid({0.0}), {2.5});
    const auto d = lamperti_direct_series(s, 0.7, 3.0);
    EXPECT_EQ(d.grid[0], 1.0);
    EXPECT_EQ(d.values[0], 2.5);

    const TimeSeries zero(TimeGrid::equispaced(20, 0.1, 0.0), std::vector<double>(20, 0.0));
    for (double v : lamperti_direct_series(zero, 0.3, 4.0).values) {
        EXPECT_EQ(v, 0.0);
    }
}

TEST(LampertiDirect, OverflowGuardNamesIndex) {
    const TimeSeries s(TimeGrid({0.0, 1.0, 2.0, 3.0}), {0.0, 0.0, 0.0, 0.0});
    try {
        lamperti_direct_series(s, 0.5, 300.0);
        FAIL() << "expected RangeError";
    } catch (const RangeError& e) {
        EXPECT_EQ(e.index(), 3u);
    }
    EXPECT_NO_THROW(lamperti_direct_series(s, 0.5, 200.0));
}

TEST(LampertiInverse, Examples) {
    const TimeSeries s(TimeGrid({1.0}), {-1.5});
    const auto d = lamperti_inverse_series(s, 0.4, 2.0);
    EXPECT_EQ(d.grid[0], 0.0);
    EXPECT_EQ(d.values[0], -1.5);
    EXPECT_THROW(lamperti_inverse_series(TimeSeries(TimeGrid({0.0, 1.0}), {1.0, 1.0}), 0.5, 1.0), DomainError);
}

TEST(Lamperti, RoundTripsBothWays) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> h(0.05, 0.95);
    std::uniform_real_distribution<double> th(0.1, 20.0);
    for (int k = 0; k < 200; ++k) {
        const double hp = h(rng);
        const double tp = th(rng);
        const auto raw = random_series(rng, 30, 0.0);
        const auto back = lamperti_inverse_series(lamperti_direct_series(raw, hp, tp), hp, tp);
        expect_rel_near(back.values, raw.values, 1e-10);
        for (std::size_t i = 0; i < raw.size(); ++i) {
            EXPECT_NEAR(back.grid[i], raw.grid[i], 1e-10 * std::max(1.0, raw.grid[i]));
        }
        const auto ss = random_series(rng, 30, 0.5);
        const auto again = lamperti_direct_series(lamperti_inverse_series(ss, hp, tp), hp, tp);
        expect_rel_near(again.values, ss.values, 1e-10);
        for (std::size_t i = 0; i < ss.size(); ++i) {
            EXPECT_NEAR(again.grid[i], ss.grid[i], 1e-10 * ss.grid[i]);
        }
    }
}

TEST(Lamperti, InverseOfFbmHasDelampertizedCovariance) {
    const double h = 0.65;
    const double theta = 2.0;
    const std::vector<double> raw{0.0, 0.1, 0.3};
    std::vector<double> exp_times;
    for (double t : raw) {
        exp_times.push_back(std::exp(theta * t));
    }
    const PathSampler fbm(TimeGrid(exp_times), {h, 1.0, 1.0, 0.0}, Model::fbm);
    std::vector<double> p01;
    std::vector<double> p02;
    for (std::uint64_t r = 0; r < 20000; ++r) {
        const auto y = lamperti_inverse_series(fbm.sample(stream_seed(31, r)), h, theta);
        p01.push_back(y.values[0] * y.values[1]);
        p02.push_back(y.values[0] * y.values[2]);
    }
    const auto a = oracle::mean_se(p01);
    const auto b = oracle::mean_se(p02);
    EXPECT_NEAR(a.mean, delamperti_covariance(0.1, h, theta), 3 * a.se);
    EXPECT_NEAR(b.mean, delamperti_covariance(0.3, h, theta), 3 * b.se);
}

TEST(TimeMap, Examples) {
    const auto same = composed_process_time_map(2.7, 0.6, 3.0, 0.6, 3.0);
    EXPECT_DOUBLE_EQ(same.scale, 1.0);
    EXPECT_DOUBLE_EQ(same.time, 2.7);
    const auto one = composed_process_time_map(1.0, 0.3, 5.0, 0.8, 2.0);
    EXPECT_DOUBLE_EQ(one.scale, 1.0);
    EXPECT_DOUBLE_EQ(one.time, 1.0);
    EXPECT_THROW(composed_process_time_map(0.0, 0.3, 5.0, 0.8, 2.0), DomainError);
    EXPECT_DOUBLE_EQ(composite_exponent(0.5, 30.0, 0.7, 10.0), 0.7 - 3.0 * 0.5);
}

TEST(TimeMap, VarianceOfZIsTPowerAnalytically) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> h(0.05, 0.95);
    std::uniform_real_distribution<double> th(0.2, 10.0);
    std::uniform_real_distribution<double> t(0.05, 20.0);
    for (int k = 0; k < 500; ++k) {
        const double hh = h(rng);
        const double hp = h(rng);
        const double a = th(rng);
        const double b = th(rng);
        const double tt = t(rng);
        const auto m = composed_process_time_map(tt, hh, a, hp, b);
        const double var = m.scale * m.scale * std::pow(m.time, 2 * hh);
        EXPECT_NEAR(var, std::pow(tt, 2 * hp), 1e-11 * std::pow(tt, 2 * hp));
    }
}

TEST(TimeMap, VarianceOfZMonteCarlo) {
    const double h = 0.4;
    const double theta = 3.0;
    const double hp = 0.7;
    const double tp = 1.5;
    const std::vector<double> ts{0.5, 2.0};
    std::vector<double> mapped;
    std::vector<double> scale;
    for (double t : ts) {
        const auto m = composed_process_time_map(t, h, theta, hp, tp);
        mapped.push_back(m.time);
        scale.push_back(m.scale);
    }
    const PathSampler fbm(TimeGrid(mapped), {h, 1.0, 1.0, 0.0}, Model::fbm);
    std::vector<std::vector<double>> sq(2);
    for (std::uint64_t r = 0; r < 20000; ++r) {
        const auto x = fbm.sample(stream_seed(41, r));
        for (int i = 0; i < 2; ++i) {
            const double z = scale[i] * x.values[i];
            sq[i].push_back(z * z);
        }
    }
    for (int i = 0; i < 2; ++i) {
        const auto ms = oracle::mean_se(sq[i]);
        EXPECT_NEAR(ms.mean, std::pow(ts[i], 2 * hp), 3 * ms.se);
    }
}

TEST(IncrementVariance, MatchesDefinitionInHighPrecision) {
    // cancellations reach exp(-r ln(1 + tau/t)), far below 50 digits
    using Big = boost::multiprecision::cpp_dec_float_100;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> h(0.05, 0.95);
    std::uniform_real_distribution<double> th(0.2, 10.0);
    std::uniform_real_distribution<double> t(0.05, 5.0);
    for (int k = 0; k < 2000; ++k) {
        const double hh = h(rng);
        const double hp = h(rng);
        const double a = th(rng);
        const double b = th(rng);
        const double t0 = t(rng);
        const double tau = t(rng);
        const Big r = Big(a) / Big(b);
        const Big hx = Big(hp) - r * Big(hh);
        const Big bt(t0);
        const Big bu = bt + Big(tau);
        using boost::multiprecision::pow;
        const Big v = pow(bu, 2 * Big(hp)) + pow(bt, 2 * Big(hp)) -
                      pow(bu * bt, hx) * (pow(bu, 2 * Big(hh) * r) + pow(bt, 2 * Big(hh) * r) -
                                          pow(pow(bu, r) - pow(bt, r), 2 * Big(hh)));
        const double ref = 1.7 * 1.7 * v.convert_to<double>();
        EXPECT_NEAR(composed_increment_variance(t0, tau, hh, a, hp, b, 1.7), ref, 1e-10 * ref);
    }
}

TEST(IncrementVariance, EndpointsAndStationarity) {
    EXPECT_DOUBLE_EQ(composed_increment_variance(0.0, 0.3, 0.4, 2.0, 0.7, 5.0, 2.0), 4.0 * std::pow(0.3, 1.4));

    // matched parameters: Z is an fBm, increments are stationary
    const double base = composed_increment_variance(0.5, 0.2, 0.6, 3.0, 0.6, 3.0, 1.0);
    EXPECT_NEAR(base, std::pow(0.2, 1.2), 1e-12);
    for (double t : {1.0, 7.0, 50.0, 1e4}) {
        EXPECT_NEAR(composed_increment_variance(t, 0.2, 0.6, 3.0, 0.6, 3.0, 1.0), base, 1e-9 * base);
    }

    // H = H', theta != theta': large-t limit sigma^2 (theta tau / theta')^2H'
    const double lim = std::pow(2.0 * 0.3 / 5.0, 2 * 0.55);
    EXPECT_NEAR(composed_increment_variance(1e8, 0.3, 0.55, 2.0, 0.55, 5.0, 1.0), lim, 1e-6 * lim);
}

TEST(IncrementVariance, SmallTauAsymptoteDependsOnT) {
    const double h = 0.4;
    const double theta = 2.0;
    const double hp = 0.7;
    const double tp = 5.0;
    const double tau = 1e-7;
    auto asym = [&](double t) { return std::pow(t, 2 * hp) * std::pow(theta * tau / (tp * t), 2 * h); };
    const double v1 = composed_increment_variance(1.0, tau, h, theta, hp, tp, 1.0);
    const double v3 = composed_increment_variance(3.0, tau, h, theta, hp, tp, 1.0);
    EXPECT_NEAR(v1 / asym(1.0), 1.0, 1e-3);
    EXPECT_NEAR(v3 / asym(3.0), 1.0, 1e-3);
    EXPECT_NEAR(v3 / v1, std::pow(3.0, 2 * hp - 2 * h), 1e-3 * std::pow(3.0, 2 * hp - 2 * h));
    EXPECT_GT(std::abs(v3 / v1 - 1.0), 0.1);
}
