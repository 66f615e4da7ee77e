#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace dfbm {

enum class Method { ml, aam };

std::string_view method_name(Method m) noexcept;

struct EstimationResult {
    Method method = Method::ml;
    double hurst = 0.0;
    double theta = 0.0;
    double objective = 0.0;         ///< log-likelihood (ML) or f_S (AAM) at the optimum
    std::optional<double> h_slope;  ///< half log-log slope at the optimum (AAM)
    std::optional<double> alpha;    ///< linearity indicator at the optimum (AAM)
    std::size_t iterations = 0;
    std::size_t evaluations = 0;
    bool converged = false;
    double wall_seconds = 0.0;
};

}  // namespace dfbm
