#pragma once

#include <array>
#include <cstddef>
#include <functional>

namespace dfbm {

/// A candidate (H, theta).
struct ParamPoint {
    double hurst = 0.5;
    double theta = 1.0;
};

enum class Direction { minimize, maximize };

/// How the simplex is kept inside 0 < H < 1, theta > 0.
///  - transform: iterate on unconstrained (x, y) with
///    H = 1/2 + atan(x)/pi and theta = exp(y);
///  - box: iterate on (H, theta) and clamp every new vertex with constrain_box.
enum class ConstraintMode { transform, box };

inline constexpr double kBoxEpsilon = 1e-4;
inline constexpr double kBoxThetaMax = 1e4;

/// Clamps H into [eps, 1 - eps] and theta into [eps, 1e4], eps = 1e-4.
ParamPoint constrain_box(ParamPoint p) noexcept;

/// (x, y) -> (1/2 + atan(x)/pi, exp(y)).
ParamPoint transform_params(double x, double y) noexcept;

/// Inverse of transform_params. Throws DomainError outside the open domain.
std::array<double, 2> untransform_params(ParamPoint p);

struct SimplexState {
    std::array<ParamPoint, 3> vertices;
    std::array<double, 3> values;  ///< objective values, always in minimization sign
    std::size_t iteration = 0;
};

inline constexpr std::array<ParamPoint, 3> kDefaultInitialSimplex{
    ParamPoint{0.45, 25.0}, ParamPoint{0.55, 28.0}, ParamPoint{0.50, 35.0}};

struct SimplexOptions {
    std::array<ParamPoint, 3> initial = kDefaultInitialSimplex;
    ConstraintMode constraints = ConstraintMode::transform;
    std::size_t max_iterations = 500;
    /// Stop once sum_{i=2,3} |1 - H_i/H_1| + |1 - theta_i/theta_1| <= tolerance.
    double tolerance = 1e-3;
    /// Run three starts, then polish from the three optima.
    bool multi_start = false;
    /// Called after every iteration with vertices sorted best-first.
    std::function<void(const SimplexState&)> observer;
};

struct SimplexResult {
    ParamPoint best;
    double value = 0.0;  ///< objective at `best`, in the caller's sign
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
};

using Objective = std::function<double(ParamPoint)>;

/// Nelder-Mead on (H, theta) with reflection 1, expansion 2, contraction 0.5
/// and shrink 0.5. Non-finite (or NaN) objective values count as the worst
/// possible value. Ties keep the lower vertex index first. Hitting
/// max_iterations is reported through `converged`, not thrown.
/// Throws EstimationError if the objective is non-finite at all initial vertices.
SimplexResult nelder_mead(const Objective& objective, Direction direction, const SimplexOptions& options);

}  // namespace dfbm
