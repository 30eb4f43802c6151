#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "rou/model.hpp"

namespace rou {

/// Seeded random source. The 64-bit Mersenne Twister is seeded from a
/// SplitMix64 scramble of the user seed; replication r of an experiment with
/// base seed s draws from stream_seed(s, r) = s ^ r.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    double normal() { return normal_(engine_); }
    /// Uniform on the open interval (0, 1).
    double uniform_open();

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

constexpr std::uint64_t stream_seed(std::uint64_t base, std::uint64_t replication) { return base ^ replication; }

struct SimConfig {
    double h = 0.5;                ///< observation step
    std::size_t n = 1000;          ///< number of observations
    int substeps = 200;            ///< Euler sub-steps per h
    std::uint64_t seed = 1;
    std::optional<double> x0;      ///< nullopt: draw X_0 from the invariant law

    void validate() const;
};

/// Observations X_h, X_2h, ..., X_nh (X_0 is not emitted).
struct Path {
    std::vector<double> values;
    ROUParams params;
    SimConfig config;
};

/// Sub-stepped Euler scheme with full reflection at zero,
/// X <- |X + kappa (theta - X) d + sigma sqrt(d) Z|, d = h / substeps.
Path simulate_path(const ROUParams& p, const SimConfig& cfg);

/// One draw from the invariant law (normal truncated to [0, inf)) by inverse cdf.
double sample_stationary(const ROUParams& p, Rng& rng);
double sample_stationary(const ROUParams& p, std::uint64_t seed);

/// Advance a state by `steps` reflected Euler sub-steps of length d.
double advance(const ROUParams& p, double x, double d, int steps, Rng& rng);

/// Independent stationary-start pairs (X~_0, X~_h).
std::vector<std::pair<double, double>> simulate_pairs(const ROUParams& p, double h, std::size_t count,
                                                      std::uint64_t seed, int substeps = 200);

}  // namespace rou
