#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dfbm {

/// Parameters of an affine-shifted delampertized fBm, S = mu + sigma * Y.
struct ModelParams {
    double hurst = 0.5;
    double theta = 1.0;
    double sigma = 1.0;
    double mu = 0.0;

    /// Throws DomainError unless 0 < hurst < 1, theta > 0 and sigma > 0.
    void validate() const;
};

void require_hurst(double hurst);
void require_theta(double theta);
void require_positive(double value, const char* name);

/// Strictly increasing observation times.
class TimeGrid {
public:
    TimeGrid() = default;
    /// Throws GridError if `times` is empty or not strictly increasing.
    explicit TimeGrid(std::vector<double> times);

    /// `count` times start, start + step, ..., start + (count - 1) * step.
    static TimeGrid equispaced(std::size_t count, double step, double start);

    std::size_t size() const noexcept { return times_.size(); }
    double operator[](std::size_t i) const { return times_[i]; }
    std::span<const double> times() const noexcept { return times_; }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }

private:
    std::vector<double> times_;
};

/// One value per observation time.
struct TimeSeries {
    TimeGrid grid;
    std::vector<double> values;

    TimeSeries() = default;
    /// Throws GridError on length mismatch.
    TimeSeries(TimeGrid g, std::vector<double> v);

    std::size_t size() const noexcept { return values.size(); }
};

}  // namespace dfbm
