#pragma once

#include <span>
#include <vector>

namespace rou {

struct SpectralOptions {
    int truncation = 12;            ///< number N of eigenpairs kept
    double scan_step = 0.05;        ///< root scan step in the order variable
    double initial_window = 50.0;   ///< first scan window [0, nu_max]
    double max_window = 800.0;      ///< window doubling stops here
    double bisection_tol = 1e-14;   ///< root refinement in the order variable
    double residual_tol = 1e-9;     ///< scaled residual acceptance
    double window_sds = 12.0;       ///< A_i, B_i integrated over [0, u + window_sds u / v]
    double quad_tol = 1e-10;

    void validate() const;
};

/// Roots of nu -> H_nu(-v / sqrt 2) in the order variable, i.e. the values
/// nu_i = 2 u^2 lambda~_i / v^2 - 1 of the Neumann condition at zero.
std::vector<double> solve_boundary_orders(double v, const SpectralOptions& opts = {});

/// The N smallest eigenvalues lambda~_i = lambda_i / sigma^2.
std::vector<double> solve_eigenvalues(double u, double v, int n, const SpectralOptions& opts = {});

/// Truncated Sturm-Liouville decomposition of the reflected OU generator for
/// one (u, v). Every sigma-dependent quantity is recovered from
/// sigma-independent factors, so one basis serves a whole sigma search.
///
/// Eigenfunctions are normalized in L2(m) and signed so that phi_i(0) > 0.
class SpectralBasis {
public:
    static SpectralBasis build(double u, double v, const SpectralOptions& opts = {});

    double u() const noexcept { return u_; }
    double v() const noexcept { return v_; }
    int size() const noexcept { return static_cast<int>(lambdas_.size()); }

    /// lambda~_i, strictly increasing.
    std::span<const double> lambdas_tilde() const noexcept { return lambdas_; }
    /// Eigenfunction orders 2 u^2 lambda~_i / v^2.
    std::span<const double> orders() const noexcept { return orders_; }
    /// phi_i(x) / sigma as a multiple of H_{order_i}((v x / u - v) / sqrt 2).
    std::span<const double> norm_constants() const noexcept { return norms_; }
    /// Delta_i = dH_{nu-1}(-v / sqrt 2)/dnu at nu = order_i.
    std::span<const double> delta() const noexcept { return deltas_; }
    /// A_i / sigma with A_i = int x pi(x) phi_i(x) dx.
    std::span<const double> a_coeffs() const noexcept { return a_; }
    /// sigma B_i with B_i = int y m(y) phi_i(y) dy.
    std::span<const double> b_coeffs() const noexcept { return b_; }
    /// A_i B_i, which does not depend on sigma.
    std::span<const double> couplings() const noexcept { return c_; }

private:
    double u_ = 0.0;
    double v_ = 0.0;
    std::vector<double> lambdas_;
    std::vector<double> orders_;
    std::vector<double> norms_;
    std::vector<double> deltas_;
    std::vector<double> a_;
    std::vector<double> b_;
    std::vector<double> c_;
};

/// phi_i(x) for 1-based index i.
double eigenfunction(const SpectralBasis& basis, int i, double sigma, double x);

/// Truncated kernel p_{N,h}(x, y) = pi(y) + m(y) sum_i e^{-lambda~_i sigma^2 h} phi_i(x) phi_i(y).
/// Not guaranteed non-negative far in the tails.
double transition_density(const SpectralBasis& basis, double sigma, double h, double x, double y);

/// E[X~_0 X~_h] = g1^2 + sum_i e^{-lambda~_i sigma^2 h} A_i B_i.
double g3(const SpectralBasis& basis, double sigma, double h);

/// d g3 / d(sigma^2) = -h sum_i lambda~_i e^{-lambda~_i sigma^2 h} A_i B_i.
double dg3_dsigma2(const SpectralBasis& basis, double sigma, double h);

/// True when dg3_dsigma2 < 0, decided on a rescaled sum so the answer
/// survives underflow of the exponentials at large sigma.
bool g3_strictly_decreasing_at(const SpectralBasis& basis, double sigma, double h);

/// Magnitude of the last retained term, e^{-lambda~_N sigma^2 h} |A_N B_N|.
double truncation_tail(const SpectralBasis& basis, double sigma, double h);

}  // namespace rou
