#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rou/model.hpp"
#include "rou/simulate.hpp"
#include "rou/spectral.hpp"

namespace rou {

/// Sample moments of an equidistant record X_h, ..., X_nh.
struct MomentStats {
    double m1 = 0.0;  ///< mean of X_kh
    double m2 = 0.0;  ///< mean of X_kh^2
    double m3 = 0.0;  ///< mean of the n - 1 products X_kh X_(k+1)h
    std::size_t n = 0;
    double h = 0.0;
};

MomentStats moment_stats(std::span<const double> values, double h);
MomentStats moment_stats(const Path& path);

struct UVSolution {
    double u = 0.0;
    double v = 0.0;
    int iterations = 0;
    double residual = 0.0;  ///< max-norm of (g1 - m1, g2 - m2)
};

/// Step (i): invert (g1, g2) by damped Newton with the analytic Jacobian.
UVSolution solve_uv(double m1, double m2);

struct SigmaInterval {
    double lo = 0.05;
    double hi = 5.0;

    void validate() const;
};

struct SigmaSolution {
    double sigma = 0.0;
    bool at_boundary = false;
    int iterations = 0;
    double g3_lo = 0.0;  ///< g3 at the interval ends (g3 decreases in sigma)
    double g3_hi = 0.0;
    double residual = 0.0;  ///< |g3(sigma) - m3|
};

/// Step (ii): bisection for g3(u, v, sigma) = m3 on the interval, after
/// certifying dg3/dsigma^2 < 0 on a grid covering it.
SigmaSolution solve_sigma(const SpectralBasis& basis, double m3, double h, SigmaInterval interval = {},
                          double tol = 1e-8);
SigmaSolution solve_sigma(double u, double v, double m3, double h, SigmaInterval interval = {},
                          const SpectralOptions& opts = {});

struct EstimationResult {
    double theta_hat = 0.0;
    double kappa_hat = 0.0;
    double sigma_hat = 0.0;
    double u_hat = 0.0;
    double v_hat = 0.0;
    double sigma_c_hat = 0.0;
    int iterations_uv = 0;
    SigmaInterval bracket_sigma;
    MomentStats moments;
    double residual_uv = 0.0;
    double residual_sigma = 0.0;
    double truncation_tail = 0.0;
    bool sigma_at_boundary = false;
};

/// Steps (i)-(iii) plus the quadratic-variation comparison estimator. Errors
/// are rethrown as StageError labelled moments / solve_uv / basis /
/// solve_sigma.
EstimationResult estimate_all(std::span<const double> values, double h, SigmaInterval interval = {},
                              int truncation = 12);
EstimationResult estimate_all(const Path& path, SigmaInterval interval = {}, int truncation = 12);

/// sqrt(sum (X_(k+1)h - X_kh)^2 / ((n - 1) h)).
double sigma_c(std::span<const double> values, double h);
double sigma_c(const Path& path);

struct CovarianceOptions {
    int substeps = 200;
    int truncation = 12;
    SigmaInterval interval;
    unsigned threads = 0;  ///< 0: hardware concurrency
};

/// Empirical covariance of sqrt(n) ((theta^, kappa^, sigma^) - truth) over
/// independent replications. Replication r uses seed stream_seed(seed, r).
struct CovarianceReport {
    Mat3 covariance{};                 ///< order (theta, kappa, sigma)
    std::array<double, 3> mean{};      ///< mean of sqrt(n) (estimate - truth)
    std::array<double, 3> z_scores{};  ///< mean / (sd / sqrt(reps))
    Mat3 eta_jacobian{};               ///< delta-method Jacobian at the truth
    std::vector<std::array<double, 3>> scaled_errors;  ///< successful reps, by index
    std::size_t failures = 0;
};

CovarianceReport mc_covariance(const ROUParams& truth, double h, std::size_t n, std::size_t reps,
                               std::uint64_t seed, const CovarianceOptions& opts = {});

/// Anderson-Darling A*^2 for normality with estimated mean and variance
/// (Stephens' small-sample correction). Reject at 1% when > 1.035.
double anderson_darling_normal(std::span<const double> sample);
inline constexpr double kAndersonDarlingCritical1pct = 1.035;

}  // namespace rou
