#include "dfbm/types.hpp"

#include <cmath>
#include <string>

#include "dfbm/errors.hpp"

namespace dfbm {

void require_hurst(double hurst) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw DomainError("Hurst exponent must lie in (0, 1), got " + std::to_string(hurst));
    }
}

void require_theta(double theta) {
    if (!(theta > 0.0) || !std::isfinite(theta)) {
        throw DomainError("theta must be positive and finite, got " + std::to_string(theta));
    }
}

void require_positive(double value, const char* name) {
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DomainError(std::string(name) + " must be positive and finite, got " + std::to_string(value));
    }
}

void ModelParams::validate() const {
    require_hurst(hurst);
    require_theta(theta);
    require_positive(sigma, "sigma");
    if (!std::isfinite(mu)) {
        throw DomainError("mu must be finite");
    }
}

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty()) {
        throw GridError("time grid is empty");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!std::isfinite(times_[i])) {
            throw GridError("time " + std::to_string(i) + " is not finite");
        }
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw GridError("times are not strictly increasing at index " + std::to_string(i));
        }
    }
}

TimeGrid TimeGrid::equispaced(std::size_t count, double step, double start) {
    require_positive(step, "step");
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) {
        t[i] = start + static_cast<double>(i) * step;
    }
    return TimeGrid(std::move(t));
}

TimeSeries::TimeSeries(TimeGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
    if (values.size() != grid.size()) {
        throw GridError("series has " + std::to_string(values.size()) + " values for " +
                        std::to_string(grid.size()) + " times");
    }
}

}  // namespace dfbm
