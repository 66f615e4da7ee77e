#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "dfbm/kernels.hpp"
#include "dfbm/lamperti.hpp"
#include "dfbm/process.hpp"
#include "dfbm/rng.hpp"

using namespace dfbm;

namespace {

std::vector<double> grid_times(std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) {
        t[i] = 0.001 * static_cast<double>(i + 1);
    }
    return t;
}

/// A transformed path with the scales and bandwidths AAM would use.
struct MomentInput {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> scales;
    std::vector<double> bandwidths;
};

MomentInput moment_input(std::size_t n) {
    const auto s = sample_path(TimeGrid::equispaced(n, 0.001, 0.001), {0.65, 30.0, 1.0, 0.0}, Model::delampertized,
                               stream_seed(1, n));
    const auto z = lamperti_direct_series(s, 0.65, 30.0);
    MomentInput in;
    in.times.assign(z.grid.times().begin(), z.grid.times().end());
    in.values = z.values;
    const double span = in.times.back() - in.times.front();
    for (int i = 0; i < 15; ++i) {
        in.scales.push_back(span * 0.2 * std::pow(0.01, 1.0 - i / 14.0));
        in.bandwidths.push_back(0.5 * in.scales.back());
    }
    return in;
}

void BM_CovarianceSerial(benchmark::State& st) {
    const auto t = grid_times(static_cast<std::size_t>(st.range(0)));
    Eigen::MatrixXd m;
    for (auto _ : st) {
        kernels::serial::fill_delamperti_covariance(t, 0.65, 30.0, m);
        benchmark::DoNotOptimize(m.data());
    }
}

void BM_CovarianceOpenMP(benchmark::State& st) {
    const auto t = grid_times(static_cast<std::size_t>(st.range(0)));
    Eigen::MatrixXd m;
    for (auto _ : st) {
        kernels::fill_delamperti_covariance(t, 0.65, 30.0, m);
        benchmark::DoNotOptimize(m.data());
    }
}

void BM_PairMomentsSerial(benchmark::State& st) {
    const auto in = moment_input(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        auto r = kernels::serial::smoothed_pair_moments(in.times, in.values, in.scales, in.bandwidths,
                                                        KernelFamily::epanechnikov, 0.65);
        benchmark::DoNotOptimize(r.data());
    }
}

void BM_PairMomentsOpenMP(benchmark::State& st) {
    const auto in = moment_input(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st) {
        auto r = kernels::smoothed_pair_moments(in.times, in.values, in.scales, in.bandwidths,
                                                KernelFamily::epanechnikov, 0.65);
        benchmark::DoNotOptimize(r.data());
    }
}

}  // namespace

BENCHMARK(BM_CovarianceSerial)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CovarianceOpenMP)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PairMomentsSerial)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PairMomentsOpenMP)->Arg(200)->Arg(1000)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
