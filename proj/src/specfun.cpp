#include "rou/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "rou/errors.hpp"

namespace rou::specfun {

namespace {

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

struct ValueAndSlope {
    double value;
    double slope;
};

// sum_k (-1)^k (-nu/2)_k ((1-nu)/2)_k / (k! x^{2k}); H_nu(x) ~ (2x)^nu * sum.
// Returns false when the series starts diverging before it has converged.
bool asymptotic_sum(double nu, double x, double& out) {
    const double inv_x2 = 1.0 / (x * x);
    const double a = -0.5 * nu;
    const double b = 0.5 * (1.0 - nu);
    double sum = 1.0;
    double term = 1.0;
    for (int k = 0; k < 2000; ++k) {
        const double ratio = -(a + k) * (b + k) / (k + 1.0) * inv_x2;
        const double next = term * ratio;
        if (next == 0.0) {
            out = sum;
            return true;
        }
        if (k > nu + 1.0 && std::abs(ratio) >= 1.0) return false;
        sum += next;
        term = next;
        if (std::abs(term) < 1e-17 * std::abs(sum)) {
            out = sum;
            return true;
        }
    }
    return false;
}

bool asymptotic_hermite(double nu, double x, ValueAndSlope& out) {
    double s = 0.0;
    if (!asymptotic_sum(nu, x, s)) return false;
    out.value = std::pow(2.0 * x, nu) * s;
    if (nu == 0.0) {
        out.slope = 0.0;
        return true;
    }
    double s1 = 0.0;
    if (!asymptotic_sum(nu - 1.0, x, s1)) return false;
    out.slope = 2.0 * nu * std::pow(2.0 * x, nu - 1.0) * s1;
    return true;
}

// One Taylor step of y'' = 2 x y' - 2 nu y from x0 to x0 + t.
ValueAndSlope taylor_step(double nu, double x0, ValueAndSlope s, double t) {
    double c0 = s.value;
    double c1 = s.slope;
    double y = c0 + c1 * t;
    double dy = c1;
    const double scale = std::abs(c0) + std::abs(c1 * t);
    double tpow = t;  // t^(k+1)
    int small_run = 0;
    for (int k = 0; k < 400; ++k) {
        const double c2 = (2.0 * x0 * (k + 1.0) * c1 + 2.0 * (k - nu) * c0) / ((k + 1.0) * (k + 2.0));
        const double dterm = (k + 2.0) * c2 * tpow;
        tpow *= t;
        const double term = c2 * tpow;
        y += term;
        dy += dterm;
        c0 = c1;
        c1 = c2;
        if (std::abs(term) <= 1e-18 * scale && std::abs(dterm * t) <= 1e-18 * scale) {
            if (++small_run >= 2) break;
        } else {
            small_run = 0;
        }
    }
    return {y, dy};
}

double hermite_series(double nu, double x) {
    const Tolerance tight{1e-300, 1e-17, 1000};
    const double z = x * x;
    const double r1 = rgamma(0.5 * (1.0 - nu));
    const double r2 = rgamma(-0.5 * nu);
    double acc = 0.0;
    if (r1 != 0.0) acc += kummer_m(-0.5 * nu, 0.5, z, tight) * r1;
    if (r2 != 0.0) acc -= 2.0 * x * kummer_m(0.5 * (1.0 - nu), 1.5, z, tight) * r2;
    return std::pow(2.0, nu) * std::sqrt(std::numbers::pi) * acc;
}

double hermite_ode(double nu, double x) {
    double x_far = std::max({x, 8.0, std::sqrt(2.0 * std::max(nu, 0.0) + 1.0) + 6.0});
    ValueAndSlope state{};
    int attempts = 0;
    while (!asymptotic_hermite(nu, x_far, state)) {
        x_far += 4.0;
        if (++attempts > 20) {
            throw ConvergenceError("hermite: asymptotic start failed for nu=" + std::to_string(nu));
        }
    }
    double x0 = x_far;
    while (x0 > x) {
        const double step = std::min(0.25, 0.75 / std::abs(x0));
        const double t = std::max(x - x0, -step);
        state = taylor_step(nu, x0, state, t);
        x0 = (t == x - x0) ? x : x0 + t;
    }
    return state.value;
}

}  // namespace

void Tolerance::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_terms < 1) {
        throw DomainError("Tolerance: abs_tol, rel_tol must be > 0 and max_terms >= 1");
    }
}

double gamma(double x) {
    if (is_nonpositive_integer(x)) {
        throw PoleError("gamma: pole at x=" + std::to_string(x));
    }
    return std::tgamma(x);
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

double kummer_m_partial(double a, double b, double z, int terms) {
    if (is_nonpositive_integer(b)) throw PoleError("kummer_m: b is a non-positive integer");
    double sum = 0.0;
    double term = 1.0;
    for (int k = 0; k < terms; ++k) {
        sum += term;
        term *= (a + k) * z / ((b + k) * (k + 1.0));
    }
    return sum;
}

double kummer_m(double a, double b, double z, const Tolerance& tol) {
    tol.validate();
    if (is_nonpositive_integer(b)) throw PoleError("kummer_m: b is a non-positive integer");
    if (std::abs(z) > kKummerMaxAbsZ) {
        throw DomainError("kummer_m: |z|=" + std::to_string(std::abs(z)) + " exceeds series limit " +
                          std::to_string(kKummerMaxAbsZ));
    }
    double sum = 1.0;
    double term = 1.0;
    for (int k = 0; k < tol.max_terms; ++k) {
        term *= (a + k) * z / ((b + k) * (k + 1.0));
        sum += term;
        // Only stop once the terms are shrinking, i.e. k past |z| and past -a.
        const bool shrinking = (k + 1.0) > std::abs(z) && (a + k) > -1.0;
        if (term == 0.0 ||
            (shrinking && std::abs(term) <= std::max(tol.abs_tol, tol.rel_tol * std::abs(sum)))) {
            return sum;
        }
    }
    throw ConvergenceError("kummer_m: no convergence within " + std::to_string(tol.max_terms) + " terms");
}

double hermite(double nu, double x) {
    if (!std::isfinite(nu) || !std::isfinite(x)) throw DomainError("hermite: non-finite argument");
    // Integer orders must use the series: there H is the recessive solution
    // for x -> -inf and the ODE route cannot resolve it.
    const bool integer_order = nu == std::floor(nu);
    if (x <= kHermiteSeriesCutoff && (nu <= kHermiteSeriesMaxOrder || integer_order)) {
        return hermite_series(nu, x);
    }
    return hermite_ode(nu, x);
}

double hermite_dnu(double nu, double x, double step) {
    return (hermite(nu + step, x) - hermite(nu - step, x)) / (2.0 * step);
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_hazard(double v) { return normal_pdf(v) / normal_cdf(v); }

}  // namespace rou::specfun
