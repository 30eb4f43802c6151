#pragma once

// Real-order special functions used by the spectral expansion of the
// reflected OU transition density.

namespace rou::specfun {

/// Stopping rule for power series.
struct Tolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_terms = 500;

    /// Throws DomainError when any field is out of range.
    void validate() const;
};

/// Largest |z| accepted by kummer_m. Beyond this the direct series loses
/// too many digits to cancellation and callers must use another route.
inline constexpr double kKummerMaxAbsZ = 36.0;

/// Central-difference step in the order parameter used by hermite_dnu.
inline constexpr double kOrderStep = 1e-5;

/// Euler Gamma. Throws PoleError at non-positive integers.
double gamma(double x);

/// 1/Gamma(x), continued analytically: exactly 0 at the poles.
double rgamma(double x);

/// Kummer's confluent hypergeometric function M(a, b, z) by direct series.
/// Throws PoleError when b is a non-positive integer, DomainError when
/// |z| > kKummerMaxAbsZ and ConvergenceError when tol.max_terms is exhausted.
double kummer_m(double a, double b, double z, const Tolerance& tol = {});

/// Partial sum of the first `terms` terms of the Kummer series (no
/// convergence requirement).
double kummer_m_partial(double a, double b, double z, int terms);

/// Hermite function H_nu(x) of real order.
///
/// For x <= kHermiteSeriesCutoff and moderate order the two-term Kummer
/// representation
///
///   H_nu(x) = 2^nu sqrt(pi) [ M(-nu/2, 1/2, x^2) / Gamma((1-nu)/2)
///                             - 2x M((1-nu)/2, 3/2, x^2) / Gamma(-nu/2) ]
///
/// is summed directly (valid down to x = -6). For larger x the two terms
/// cancel catastrophically, and for large non-integer order the series
/// itself does, so there the function is started from its large-x
/// asymptotic expansion and carried back to x by Taylor-stepping the
/// Hermite ODE y'' - 2x y' + 2 nu y = 0, which is stable in that direction.
double hermite(double nu, double x);

/// Boundary between the Kummer route and the ODE route in hermite().
inline constexpr double kHermiteSeriesCutoff = 1.5;

/// Non-integer orders above this always take the ODE route.
inline constexpr double kHermiteSeriesMaxOrder = 12.0;

/// dH_nu(x)/dnu by central difference with step kOrderStep.
double hermite_dnu(double nu, double x, double step = kOrderStep);

double normal_pdf(double x);
double normal_cdf(double x);

/// Upper tail 1 - Phi(x), computed without cancellation.
double normal_sf(double x);

/// Inverse of normal_cdf on (0, 1).
double normal_quantile(double p);

/// Mills-type hazard phi(v) / (1 - Phi(-v)) = phi(v) / Phi(v).
double normal_hazard(double v);

}  // namespace rou::specfun
