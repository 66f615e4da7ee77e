#include "dfbm/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dfbm/errors.hpp"
#include "dfbm/types.hpp"

namespace dfbm {

ParamPoint constrain_box(ParamPoint p) noexcept {
    // NaN compares false everywhere; send it to the lower border.
    p.hurst = std::isnan(p.hurst) ? kBoxEpsilon : std::clamp(p.hurst, kBoxEpsilon, 1.0 - kBoxEpsilon);
    p.theta = std::isnan(p.theta) ? kBoxEpsilon : std::clamp(p.theta, kBoxEpsilon, kBoxThetaMax);
    return p;
}

ParamPoint transform_params(double x, double y) noexcept {
    // keep the image open: atan rounds to +-pi/2 and exp underflows far out
    const double h = std::clamp(0.5 + std::atan(x) / std::numbers::pi, std::nextafter(0.0, 1.0),
                                std::nextafter(1.0, 0.0));
    const double theta = std::clamp(std::exp(y), std::numeric_limits<double>::min(),
                                    std::numeric_limits<double>::max());
    return {h, theta};
}

std::array<double, 2> untransform_params(ParamPoint p) {
    require_hurst(p.hurst);
    require_theta(p.theta);
    return {std::tan(std::numbers::pi * (p.hurst - 0.5)), std::log(p.theta)};
}

namespace {

using Vec2 = std::array<double, 2>;

Vec2 lerp(const Vec2& from, const Vec2& to, double t) {
    return {from[0] + t * (to[0] - from[0]), from[1] + t * (to[1] - from[1])};
}

class Engine {
public:
    Engine(const Objective& f, Direction dir, ConstraintMode mode) : f_(f), dir_(dir), mode_(mode) {}

    ParamPoint to_params(const Vec2& u) const {
        return mode_ == ConstraintMode::transform ? transform_params(u[0], u[1]) : ParamPoint{u[0], u[1]};
    }

    Vec2 from_params(ParamPoint p) const {
        if (mode_ == ConstraintMode::transform) {
            return untransform_params(p);
        }
        const ParamPoint c = constrain_box(p);
        return {c.hurst, c.theta};
    }

    Vec2 admissible(Vec2 u) const {
        if (mode_ == ConstraintMode::box) {
            const ParamPoint c = constrain_box({u[0], u[1]});
            return {c.hurst, c.theta};
        }
        return u;
    }

    // Minimization-sign value; anything non-finite is the worst value.
    double eval(const Vec2& u) {
        ++evaluations_;
        double v = f_(to_params(u));
        if (dir_ == Direction::maximize) {
            v = -v;
        }
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    }

    std::size_t evaluations() const noexcept { return evaluations_; }

private:
    const Objective& f_;
    Direction dir_;
    ConstraintMode mode_;
    std::size_t evaluations_ = 0;
};

double spread(const std::array<ParamPoint, 3>& v) {
    constexpr double floor = 1e-12;
    auto rel = [&](double a, double ref) {
        const double d = std::abs(ref) < floor ? std::copysign(floor, ref == 0.0 ? 1.0 : ref) : ref;
        return std::abs(1.0 - a / d);
    };
    double total = 0.0;
    for (int i = 1; i < 3; ++i) {
        total += rel(v[i].hurst, v[0].hurst) + rel(v[i].theta, v[0].theta);
    }
    return total;
}

SimplexResult run_single(const Objective& objective, Direction direction, const SimplexOptions& options,
                         const std::array<ParamPoint, 3>& initial) {
    Engine engine(objective, direction, options.constraints);
    std::array<Vec2, 3> u{};
    std::array<double, 3> f{};
    for (int i = 0; i < 3; ++i) {
        u[i] = engine.from_params(initial[i]);
        f[i] = engine.eval(u[i]);
    }
    if (std::none_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); })) {
        throw EstimationError("objective is not finite at any initial simplex vertex");
    }

    auto sort_vertices = [&] {
        std::array<int, 3> idx{0, 1, 2};
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return f[a] < f[b]; });
        const auto u0 = u;
        const auto f0 = f;
        for (int i = 0; i < 3; ++i) {
            u[i] = u0[idx[i]];
            f[i] = f0[idx[i]];
        }
    };
    auto state = [&](std::size_t iteration) {
        SimplexState s;
        for (int i = 0; i < 3; ++i) {
            s.vertices[i] = engine.to_params(u[i]);
            s.values[i] = f[i];
        }
        s.iteration = iteration;
        return s;
    };

    sort_vertices();
    std::size_t iteration = 0;
    bool converged = false;
    for (;;) {
        if (spread(state(iteration).vertices) <= options.tolerance) {
            converged = true;
            break;
        }
        if (iteration >= options.max_iterations) {
            break;
        }

        const Vec2 centroid = lerp(u[0], u[1], 0.5);
        const Vec2 reflected = engine.admissible(lerp(centroid, u[2], -1.0));
        const double fr = engine.eval(reflected);
        bool shrink = false;
        if (fr < f[0]) {
            const Vec2 expanded = engine.admissible(lerp(centroid, u[2], -2.0));
            const double fe = engine.eval(expanded);
            if (fe < fr) {
                u[2] = expanded;
                f[2] = fe;
            } else {
                u[2] = reflected;
                f[2] = fr;
            }
        } else if (fr < f[1]) {
            u[2] = reflected;
            f[2] = fr;
        } else if (fr < f[2]) {
            const Vec2 outside = engine.admissible(lerp(centroid, reflected, 0.5));
            const double fc = engine.eval(outside);
            if (fc <= fr) {
                u[2] = outside;
                f[2] = fc;
            } else {
                shrink = true;
            }
        } else {
            const Vec2 inside = engine.admissible(lerp(centroid, u[2], 0.5));
            const double fc = engine.eval(inside);
            if (fc < f[2]) {
                u[2] = inside;
                f[2] = fc;
            } else {
                shrink = true;
            }
        }
        if (shrink) {
            for (int i = 1; i < 3; ++i) {
                u[i] = engine.admissible(lerp(u[0], u[i], 0.5));
                f[i] = engine.eval(u[i]);
            }
        }
        sort_vertices();
        ++iteration;
        if (options.observer) {
            options.observer(state(iteration));
        }
    }

    SimplexResult result;
    result.best = engine.to_params(u[0]);
    result.value = direction == Direction::maximize ? -f[0] : f[0];
    result.iterations = iteration;
    result.evaluations = engine.evaluations();
    result.converged = converged;
    return result;
}

constexpr std::array<ParamPoint, 3> kLowStart{ParamPoint{0.25, 8.0}, ParamPoint{0.35, 10.0},
                                              ParamPoint{0.30, 14.0}};
constexpr std::array<ParamPoint, 3> kHighStart{ParamPoint{0.70, 60.0}, ParamPoint{0.80, 70.0},
                                               ParamPoint{0.75, 90.0}};

}  // namespace

SimplexResult nelder_mead(const Objective& objective, Direction direction, const SimplexOptions& options) {
    if (!options.multi_start) {
        return run_single(objective, direction, options, options.initial);
    }

    const std::array<std::array<ParamPoint, 3>, 3> starts{options.initial, kLowStart, kHighStart};
    std::array<ParamPoint, 3> polish_init{};
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool any_ok = false;
    for (int i = 0; i < 3; ++i) {
        try {
            const SimplexResult r = run_single(objective, direction, options, starts[i]);
            polish_init[i] = r.best;
            iterations += r.iterations;
            evaluations += r.evaluations;
            any_ok = true;
        } catch (const EstimationError&) {
            polish_init[i] = starts[i][i];
        }
    }
    if (!any_ok) {
        throw EstimationError("objective is not finite at any initial simplex vertex");
    }

    // The three optima may coincide; fall back to a small simplex around the
    // first one so the polish run starts non-degenerate.
    const double area = std::abs((polish_init[1].hurst - polish_init[0].hurst) *
                                     (polish_init[2].theta - polish_init[0].theta) -
                                 (polish_init[2].hurst - polish_init[0].hurst) *
                                     (polish_init[1].theta - polish_init[0].theta));
    if (!(area > 1e-10 * polish_init[0].theta)) {
        const ParamPoint c = polish_init[0];
        const double dh = std::min(0.05, 0.5 * std::min(c.hurst, 1.0 - c.hurst));
        polish_init = {c, ParamPoint{c.hurst + dh, c.theta * 1.1}, ParamPoint{c.hurst, c.theta * 1.25}};
    }
    SimplexResult final_run = run_single(objective, direction, options, polish_init);
    final_run.iterations += iterations;
    final_run.evaluations += evaluations;
    return final_run;
}

}  // namespace dfbm
