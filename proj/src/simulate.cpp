#include "rou/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "rou/errors.hpp"
#include "rou/specfun.hpp"

namespace rou {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

double Rng::uniform_open() {
    for (;;) {
        const double u = std::generate_canonical<double, 53>(engine_);
        if (u > 0.0) return u;
    }
}

void SimConfig::validate() const {
    if (!(h > 0.0)) throw DomainError("SimConfig: h must be positive");
    if (n < 1) throw DomainError("SimConfig: n must be >= 1");
    if (substeps < 1) throw DomainError("SimConfig: substeps must be >= 1");
    if (x0 && !(*x0 >= 0.0)) throw DomainError("SimConfig: x0 must be >= 0");
}

double sample_stationary(const ROUParams& p, Rng& rng) {
    const ReparamUV q = to_uv(p);
    // Upper-tail mass of the truncated normal, (1 - U) Phi(v), inverted
    // without forming 1 - p.
    const double tail = (1.0 - rng.uniform_open()) * specfun::normal_cdf(q.v);
    const double z = -specfun::normal_quantile(tail);
    return std::max(0.0, q.u + (q.u / q.v) * z);
}

double sample_stationary(const ROUParams& p, std::uint64_t seed) {
    Rng rng(seed);
    return sample_stationary(p, rng);
}

double advance(const ROUParams& p, double x, double d, int steps, Rng& rng) {
    const double drift = p.kappa * d;
    const double diffusion = p.sigma * std::sqrt(d);
    for (int s = 0; s < steps; ++s) {
        x = std::abs(x + drift * (p.theta - x) + diffusion * rng.normal());
    }
    return x;
}

Path simulate_path(const ROUParams& p, const SimConfig& cfg) {
    p.validate();
    cfg.validate();
    Rng rng(cfg.seed);
    double x = cfg.x0 ? *cfg.x0 : sample_stationary(p, rng);
    const double d = cfg.h / cfg.substeps;
    Path path{{}, p, cfg};
    path.values.reserve(cfg.n);
    for (std::size_t k = 0; k < cfg.n; ++k) {
        x = advance(p, x, d, cfg.substeps, rng);
        path.values.push_back(x);
    }
    return path;
}

std::vector<std::pair<double, double>> simulate_pairs(const ROUParams& p, double h, std::size_t count,
                                                      std::uint64_t seed, int substeps) {
    p.validate();
    if (!(h > 0.0) || substeps < 1) throw DomainError("simulate_pairs: need h > 0 and substeps >= 1");
    Rng rng(seed);
    const double d = h / substeps;
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double x = sample_stationary(p, rng);
        pairs.emplace_back(x, advance(p, x, d, substeps, rng));
    }
    return pairs;
}

}  // namespace rou
