#include "rou/estimate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <thread>

#include "rou/errors.hpp"
#include "rou/specfun.hpp"

namespace rou {

namespace {

template <typename F>
auto run_stage(const char* stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

struct Residual {
    double r1;
    double r2;
    double scaled;  // max of the two, each relative to max(1, |target|)
};

Residual uv_residual(double u, double v, double m1, double m2) {
    const double r1 = g1(u, v) - m1;
    const double r2 = g2(u, v) - m2;
    return {r1, r2, std::max(std::abs(r1) / std::max(1.0, m1), std::abs(r2) / std::max(1.0, m2))};
}

}  // namespace

MomentStats moment_stats(std::span<const double> values, double h) {
    if (values.size() < 2) throw DomainError("moment_stats: need at least 2 observations");
    const std::size_t n = values.size();
    double s1 = 0.0;
    double s2 = 0.0;
    double s3 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        s1 += values[k];
        s2 += values[k] * values[k];
        if (k + 1 < n) s3 += values[k] * values[k + 1];
    }
    return {s1 / n, s2 / n, s3 / (n - 1), n, h};
}

MomentStats moment_stats(const Path& path) { return moment_stats(path.values, path.config.h); }

UVSolution solve_uv(double m1, double m2) {
    if (!(m1 > 0.0) || !(m2 > m1 * m1)) {
        throw DomainError("solve_uv: infeasible moments (need m1 > 0 and m2 > m1^2; got m1=" + std::to_string(m1) +
                          ", m2=" + std::to_string(m2) + ")");
    }
    // The truncated-normal family with theta > 0 has m2/m1^2 < pi/2 (the
    // half-normal limit v -> 0).
    if (m2 / (m1 * m1) >= 0.5 * std::numbers::pi) {
        throw DomainError("solve_uv: infeasible moments (m2/m1^2 >= pi/2, no positive theta fits)");
    }
    double u = m1;
    double v = m1 / std::sqrt(m2 - m1 * m1);
    Residual res = uv_residual(u, v, m1, m2);
    constexpr double kTol = 1e-12;
    for (int it = 0; it < 100; ++it) {
        if (res.scaled < kTol) return {u, v, it, res.scaled};
        const Mat2 j = g12_jacobian(u, v);
        const double det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if (det == 0.0 || !std::isfinite(det)) break;
        const double du = (j[1][1] * res.r1 - j[0][1] * res.r2) / det;
        const double dv = (-j[1][0] * res.r1 + j[0][0] * res.r2) / det;
        double step = 1.0;
        bool improved = false;
        for (int halving = 0; halving < 60; ++halving, step *= 0.5) {
            const double nu = u - step * du;
            const double nv = v - step * dv;
            if (!(nu > 0.0) || !(nv > 0.0)) continue;
            const Residual next = uv_residual(nu, nv, m1, m2);
            if (next.scaled < res.scaled) {
                u = nu;
                v = nv;
                res = next;
                improved = true;
                break;
            }
        }
        if (!improved) {
            // At the rounding floor; accept if already tight.
            if (res.scaled < 1e-10) return {u, v, it, res.scaled};
            break;
        }
    }
    if (res.scaled < kTol) return {u, v, 100, res.scaled};
    throw ConvergenceError("solve_uv: Newton did not converge (last u=" + std::to_string(u) +
                           ", v=" + std::to_string(v) + ", residual=" + std::to_string(res.scaled) + ")");
}

void SigmaInterval::validate() const {
    if (!(lo > 0.0) || !(hi > lo)) throw DomainError("SigmaInterval: need 0 < lo < hi");
}

SigmaSolution solve_sigma(const SpectralBasis& basis, double m3, double h, SigmaInterval interval, double tol) {
    interval.validate();
    if (!(h > 0.0)) throw DomainError("solve_sigma: h must be positive");
    constexpr int kCertificatePoints = 9;
    for (int k = 0; k < kCertificatePoints; ++k) {
        const double s = interval.lo + (interval.hi - interval.lo) * k / (kCertificatePoints - 1);
        if (!g3_strictly_decreasing_at(basis, s, h)) {
            throw ConvergenceError("solve_sigma: monotonicity certificate failed at sigma=" + std::to_string(s));
        }
    }
    SigmaSolution out;
    out.g3_lo = g3(basis, interval.lo, h);
    out.g3_hi = g3(basis, interval.hi, h);
    if (m3 == out.g3_hi || m3 == out.g3_lo) {
        out.sigma = m3 == out.g3_hi ? interval.hi : interval.lo;
        out.at_boundary = true;
        return out;
    }
    if (m3 > out.g3_lo || m3 < out.g3_hi) {
        throw DomainError("solve_sigma: m3=" + std::to_string(m3) + " outside attainable range [g3(hi)=" +
                          std::to_string(out.g3_hi) + ", g3(lo)=" + std::to_string(out.g3_lo) + "]");
    }
    double lo = interval.lo;
    double hi = interval.hi;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        // g3 is decreasing: above the target means the root lies to the right.
        if (g3(basis, mid, h) > m3) {
            lo = mid;
        } else {
            hi = mid;
        }
        ++out.iterations;
    }
    out.sigma = 0.5 * (lo + hi);
    out.residual = std::abs(g3(basis, out.sigma, h) - m3);
    return out;
}

SigmaSolution solve_sigma(double u, double v, double m3, double h, SigmaInterval interval,
                          const SpectralOptions& opts) {
    const SpectralBasis basis = SpectralBasis::build(u, v, opts);
    return solve_sigma(basis, m3, h, interval);
}

EstimationResult estimate_all(std::span<const double> values, double h, SigmaInterval interval, int truncation) {
    EstimationResult r;
    r.bracket_sigma = interval;
    r.moments = run_stage("moments", [&] {
        if (!(h > 0.0)) throw DomainError("h must be positive");
        return moment_stats(values, h);
    });
    const UVSolution uv = run_stage("solve_uv", [&] { return solve_uv(r.moments.m1, r.moments.m2); });
    r.u_hat = uv.u;
    r.v_hat = uv.v;
    r.iterations_uv = uv.iterations;
    r.residual_uv = uv.residual;

    const SpectralBasis basis = run_stage("basis", [&] {
        SpectralOptions opts;
        opts.truncation = truncation;
        return SpectralBasis::build(uv.u, uv.v, opts);
    });
    const SigmaSolution sig = run_stage("solve_sigma", [&] { return solve_sigma(basis, r.moments.m3, h, interval); });
    r.sigma_hat = sig.sigma;
    r.sigma_at_boundary = sig.at_boundary;
    r.residual_sigma = sig.residual;
    r.truncation_tail = truncation_tail(basis, sig.sigma, h);

    const ROUParams p = from_uv({uv.u, uv.v, sig.sigma});
    r.theta_hat = p.theta;
    r.kappa_hat = p.kappa;
    r.sigma_c_hat = sigma_c(values, h);
    return r;
}

EstimationResult estimate_all(const Path& path, SigmaInterval interval, int truncation) {
    return estimate_all(path.values, path.config.h, interval, truncation);
}

double sigma_c(std::span<const double> values, double h) {
    if (values.size() < 2) throw DomainError("sigma_c: need at least 2 observations");
    if (!(h > 0.0)) throw DomainError("sigma_c: h must be positive");
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
        const double d = values[k + 1] - values[k];
        s += d * d;
    }
    return std::sqrt(s / (static_cast<double>(values.size() - 1) * h));
}

double sigma_c(const Path& path) { return sigma_c(path.values, path.config.h); }

CovarianceReport mc_covariance(const ROUParams& truth, double h, std::size_t n, std::size_t reps,
                               std::uint64_t seed, const CovarianceOptions& opts) {
    truth.validate();
    if (reps < 30) throw DomainError("mc_covariance: reps must be >= 30");

    std::vector<std::optional<std::array<double, 3>>> results(reps);
    std::atomic<std::size_t> next{0};
    const double root_n = std::sqrt(static_cast<double>(n));
    auto worker = [&] {
        for (std::size_t r = next++; r < reps; r = next++) {
            SimConfig cfg;
            cfg.h = h;
            cfg.n = n;
            cfg.substeps = opts.substeps;
            cfg.seed = stream_seed(seed, r);
            try {
                const Path path = simulate_path(truth, cfg);
                const EstimationResult e = estimate_all(path, opts.interval, opts.truncation);
                results[r] = std::array<double, 3>{root_n * (e.theta_hat - truth.theta),
                                                   root_n * (e.kappa_hat - truth.kappa),
                                                   root_n * (e.sigma_hat - truth.sigma)};
            } catch (const std::exception&) {
                results[r].reset();
            }
        }
    };
    unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, reps));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }

    CovarianceReport report;
    for (const auto& r : results) {
        if (r) {
            report.scaled_errors.push_back(*r);
        } else {
            ++report.failures;
        }
    }
    const std::size_t m = report.scaled_errors.size();
    if (m < 2) throw ConvergenceError("mc_covariance: fewer than two successful replications");
    for (const auto& e : report.scaled_errors) {
        for (int i = 0; i < 3; ++i) report.mean[i] += e[i] / m;
    }
    for (const auto& e : report.scaled_errors) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                report.covariance[i][j] += (e[i] - report.mean[i]) * (e[j] - report.mean[j]) / (m - 1);
            }
        }
    }
    for (int i = 0; i < 3; ++i) {
        const double sd = std::sqrt(report.covariance[i][i]);
        report.z_scores[i] = sd > 0.0 ? report.mean[i] / (sd / std::sqrt(static_cast<double>(m))) : 0.0;
    }
    report.eta_jacobian = eta_jacobian(to_uv(truth));
    return report;
}

double anderson_darling_normal(std::span<const double> sample) {
    const std::size_t n = sample.size();
    if (n < 8) throw DomainError("anderson_darling_normal: need at least 8 observations");
    std::vector<double> x(sample.begin(), sample.end());
    std::sort(x.begin(), x.end());
    double mean = 0.0;
    for (double v : x) mean += v / n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean) / (n - 1);
    const double sd = std::sqrt(var);
    if (!(sd > 0.0)) throw DomainError("anderson_darling_normal: zero variance");
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = (x[i] - mean) / sd;
        const double hi = (x[n - 1 - i] - mean) / sd;
        s += (2.0 * i + 1.0) * (std::log(specfun::normal_cdf(lo)) + std::log(specfun::normal_sf(hi)));
    }
    const double dn = static_cast<double>(n);
    const double a2 = -dn - s / dn;
    return a2 * (1.0 + 0.75 / dn + 2.25 / (dn * dn));
}

}  // namespace rou
