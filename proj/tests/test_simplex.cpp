#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dfbm/errors.hpp"
#include "dfbm/simplex.hpp"

using namespace dfbm;

namespace {

double bowl(ParamPoint p) {
    return (p.hurst - 0.5) * (p.hurst - 0.5) + (p.theta - 30.0) * (p.theta - 30.0);
}

/// Curved valley along theta/30 = H^2, minimum at (0.6, 10.8).
double valley(ParamPoint p) {
    const double u = p.theta / 30.0;
    return (0.6 - p.hurst) * (0.6 - p.hurst) + 5.0 * (u - p.hurst * p.hurst) * (u - p.hurst * p.hurst);
}

}  // namespace

TEST(ConstrainBox, Examples) {
    const auto a = constrain_box({0.5, 30.0});
    EXPECT_EQ(a.hurst, 0.5);
    EXPECT_EQ(a.theta, 30.0);
    const auto b = constrain_box({1.2, 30.0});
    EXPECT_EQ(b.hurst, 1.0 - 1e-4);
    EXPECT_EQ(b.theta, 30.0);
    const auto c = constrain_box({-3.0, -5.0});
    EXPECT_EQ(c.hurst, 1e-4);
    EXPECT_EQ(c.theta, 1e-4);
    EXPECT_EQ(constrain_box({0.5, 1e9}).theta, kBoxThetaMax);
}

TEST(TransformParams, ExamplesRoundTripAndMonotone) {
    const auto o = transform_params(0.0, 0.0);
    EXPECT_EQ(o.hurst, 0.5);
    EXPECT_EQ(o.theta, 1.0);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> x(-50.0, 50.0);
    std::uniform_real_distribution<double> y(-10.0, 10.0);
    for (int k = 0; k < 1000; ++k) {
        const double a = x(rng);
        const double b = y(rng);
        const auto p = transform_params(a, b);
        ASSERT_GT(p.hurst, 0.0);
        ASSERT_LT(p.hurst, 1.0);
        const auto back = untransform_params(p);
        EXPECT_NEAR(back[0], a, 1e-12 * std::max(1.0, std::abs(a) * std::abs(a)));
        EXPECT_NEAR(back[1], b, 1e-12 * std::max(1.0, std::abs(b)));
        const auto q = untransform_params({rng() % 1000 / 1001.0 + 1e-4, std::exp(y(rng))});
        const auto again = transform_params(q[0], q[1]);
        EXPECT_NEAR(untransform_params(again)[0], q[0], 1e-9 * std::max(1.0, std::abs(q[0])));
    }
    double prev = 0.5;
    for (double xx = 1.0; xx < 1e6; xx *= 3.0) {
        const double h = transform_params(xx, 0.0).hurst;
        EXPECT_GT(h, prev);
        EXPECT_LT(h, 1.0);
        prev = h;
    }
    const auto far = transform_params(1e300, -1e4);
    EXPECT_LT(far.hurst, 1.0);
    EXPECT_GT(far.theta, 0.0);
    EXPECT_GT(transform_params(-1e300, 0.0).hurst, 0.0);
    EXPECT_LT(transform_params(0.0, 1e4).theta, INFINITY);
    EXPECT_THROW(untransform_params({1.0, 1.0}), DomainError);
    EXPECT_THROW(untransform_params({0.5, 0.0}), DomainError);
}

TEST(NelderMead, ConvexQuadraticBothModes) {
    for (auto mode : {ConstraintMode::transform, ConstraintMode::box}) {
        SimplexOptions o;
        o.constraints = mode;
        o.tolerance = 1e-8;
        const auto r = nelder_mead(bowl, Direction::minimize, o);
        EXPECT_NEAR(r.best.hurst, 0.5, 1e-3);
        EXPECT_NEAR(r.best.theta, 30.0, 1e-3);
        EXPECT_TRUE(r.converged);
    }
}

TEST(NelderMead, MaximizingNegationIsIdentical) {
    SimplexOptions o;
    const auto a = nelder_mead(valley, Direction::minimize, o);
    const auto b = nelder_mead([](ParamPoint p) { return -valley(p); }, Direction::maximize, o);
    EXPECT_EQ(a.best.hurst, b.best.hurst);
    EXPECT_EQ(a.best.theta, b.best.theta);
    EXPECT_EQ(a.value, -b.value);
    EXPECT_EQ(a.iterations, b.iterations);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

TEST(NelderMead, CurvedValleyMatchesGridSearch) {
    double best = INFINITY;
    ParamPoint arg;
    for (int i = 1; i < 1000; ++i) {
        for (int j = 1; j <= 6000; ++j) {
            const ParamPoint p{i / 1000.0, j / 100.0};
            const double v = valley(p);
            if (v < best) {
                best = v;
                arg = p;
            }
        }
    }
    SimplexOptions o;
    o.tolerance = 1e-9;
    const auto r = nelder_mead(valley, Direction::minimize, o);
    EXPECT_NEAR(r.best.hurst, arg.hurst, 1e-2);
    EXPECT_NEAR(r.best.theta / 30.0, arg.theta / 30.0, 1e-2);
}

TEST(NelderMead, BestValueNeverWorsensAndIteratesStayFeasible) {
    SimplexOptions o;
    double prev = INFINITY;
    bool feasible = true;
    bool monotone = true;
    o.observer = [&](const SimplexState& s) {
        monotone = monotone && s.values[0] <= prev;
        prev = s.values[0];
        for (const auto& v : s.vertices) {
            feasible = feasible && v.hurst > 0.0 && v.hurst < 1.0 && v.theta > 0.0;
        }
        monotone = monotone && s.values[0] <= s.values[1] && s.values[1] <= s.values[2];
    };
    // pushes H towards 1 and theta towards 0
    nelder_mead([](ParamPoint p) { return -p.hurst + p.theta; }, Direction::minimize, o);
    EXPECT_TRUE(monotone);
    EXPECT_TRUE(feasible);
}

TEST(NelderMead, InitialVertexOrderDoesNotMatter) {
    SimplexOptions o;
    auto init = o.initial;
    const auto ref = nelder_mead(valley, Direction::minimize, o);
    std::sort(init.begin(), init.end(), [](ParamPoint a, ParamPoint b) { return a.theta < b.theta; });
    do {
        o.initial = init;
        const auto r = nelder_mead(valley, Direction::minimize, o);
        EXPECT_EQ(r.best.hurst, ref.best.hurst);
        EXPECT_EQ(r.best.theta, ref.best.theta);
        EXPECT_EQ(r.iterations, ref.iterations);
    } while (std::next_permutation(init.begin(), init.end(),
                                   [](ParamPoint a, ParamPoint b) { return a.theta < b.theta; }));
}

TEST(NelderMead, NonFiniteValuesAndCaps) {
    EXPECT_THROW(nelder_mead([](ParamPoint) { return NAN; }, Direction::minimize, {}), EstimationError);
    // infinite outside a disc: the simplex has to stay inside it
    const auto r = nelder_mead(
        [](ParamPoint p) { return p.theta > 40.0 ? INFINITY : bowl(p); }, Direction::minimize, {});
    EXPECT_NEAR(r.best.theta, 30.0, 0.1);
    SimplexOptions capped;
    capped.max_iterations = 3;
    capped.tolerance = 1e-14;
    const auto c = nelder_mead(valley, Direction::minimize, capped);
    EXPECT_FALSE(c.converged);
    EXPECT_EQ(c.iterations, 3u);
}

TEST(NelderMead, MultiStartFindsTheBetterBasin) {
    // two wells; the default simplex sits in the shallow one
    auto f = [](ParamPoint p) {
        const double a = std::pow(p.hurst - 0.5, 2) + std::pow((p.theta - 30.0) / 30.0, 2);
        const double b = std::pow(p.hurst - 0.8, 2) + std::pow((p.theta - 80.0) / 30.0, 2);
        return std::min(a + 0.5, b);
    };
    SimplexOptions o;
    o.tolerance = 1e-8;
    const auto single = nelder_mead(f, Direction::minimize, o);
    o.multi_start = true;
    const auto multi = nelder_mead(f, Direction::minimize, o);
    EXPECT_LE(multi.value, single.value);
    EXPECT_NEAR(multi.best.hurst, 0.8, 1e-2);
    EXPECT_NEAR(multi.best.theta, 80.0, 1.0);
}
