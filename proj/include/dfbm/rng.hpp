#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace dfbm {

/// One step of the SplitMix64 sequence; advances `state`.
std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Seed of sub-stream `stream` derived from `base`.
///
/// Replication r of a study draws from stream_seed(base, r), so a table does
/// not depend on the order or the parallelism in which replications run.
/// Nested splits (stream_seed(stream_seed(base, r), 1)) give independent
/// auxiliary streams, e.g. the additive noise of replication r.
std::uint64_t stream_seed(std::uint64_t base, std::uint64_t stream) noexcept;

/// Standard normal draws from a seeded mt19937_64 via Box-Muller.
///
/// Uniforms are built from the top 53 bits of each engine output, so the
/// sequence is identical across standard libraries.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed);

    double next();
    void fill(std::span<double> out);

private:
    double uniform_open();

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dfbm
