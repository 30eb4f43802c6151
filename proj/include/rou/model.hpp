#pragma once

#include <array>

namespace rou {

using Mat2 = std::array<std::array<double, 2>, 2>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Reflected OU parameters for dX = kappa (theta - X) dt + sigma dW + dL.
struct ROUParams {
    double kappa = 1.0;  ///< mean-reversion rate, 1/time
    double theta = 1.0;  ///< long-run level, state units
    double sigma = 0.5;  ///< volatility, state units per sqrt-time

    void validate() const;
};

/// Working parameterization: u = theta, v = sqrt(2 kappa) theta / sigma.
/// The invariant law depends on (u, v) only.
struct ReparamUV {
    double u = 1.0;
    double v = 1.0;
    double sigma = 1.0;

    void validate() const;
};

ReparamUV to_uv(const ROUParams& p);

/// The recovery map eta: theta = u, kappa = v^2 sigma^2 / (2 u^2).
ROUParams from_uv(const ReparamUV& q);

/// Jacobian of eta with rows (theta, kappa, sigma) and columns (u, v, sigma).
Mat3 eta_jacobian(const ReparamUV& q);

/// Stationary density pi(x) = (v/u) phi(v x / u - v) / (1 - Phi(-v)), x >= 0.
double invariant_density(double u, double v, double x);
double invariant_density(const ReparamUV& q, double x);

/// Distribution function of pi.
double invariant_cdf(double u, double v, double x);

/// Speed density m(x) = (2 / sigma^2) exp(-v^2/2 + v^2 x / u - v^2 x^2 / (2 u^2)).
double speed_measure(const ReparamUV& q, double x);

/// E[X_inf] and E[X_inf^2] in (u, v).
double g1(double u, double v);
double g2(double u, double v);

/// Analytic d(g1, g2)/d(u, v); row i is g_{i+1}, column 0 is u.
Mat2 g12_jacobian(double u, double v);

/// Right end of the integration window [0, u + sds * u / v] used for
/// stationary integrals (sds standard deviations of the untruncated normal).
double stationary_window(double u, double v, double sds);

}  // namespace rou
