#include "rou/model.hpp"

#include <cmath>
#include <string>

#include "rou/errors.hpp"
#include "rou/specfun.hpp"

namespace rou {

namespace {

void require_nonnegative(double x, const char* what) {
    if (!(x >= 0.0)) throw DomainError(std::string(what) + ": x must be >= 0, got " + std::to_string(x));
}

void require_positive_uv(double u, double v) {
    if (!(u > 0.0) || !(v > 0.0)) throw DomainError("u and v must be positive");
}

}  // namespace

void ROUParams::validate() const {
    if (!(kappa > 0.0) || !(theta > 0.0) || !(sigma > 0.0)) {
        throw DomainError("ROUParams: kappa, theta, sigma must be positive (got " + std::to_string(kappa) +
                          ", " + std::to_string(theta) + ", " + std::to_string(sigma) + ")");
    }
}

void ReparamUV::validate() const {
    if (!(u > 0.0) || !(v > 0.0) || !(sigma > 0.0)) {
        throw DomainError("ReparamUV: u, v, sigma must be positive");
    }
}

ReparamUV to_uv(const ROUParams& p) {
    p.validate();
    return {p.theta, std::sqrt(2.0 * p.kappa) * p.theta / p.sigma, p.sigma};
}

ROUParams from_uv(const ReparamUV& q) {
    q.validate();
    return {q.v * q.v * q.sigma * q.sigma / (2.0 * q.u * q.u), q.u, q.sigma};
}

Mat3 eta_jacobian(const ReparamUV& q) {
    q.validate();
    const double u = q.u;
    const double v = q.v;
    const double s = q.sigma;
    Mat3 j{};
    j[0] = {1.0, 0.0, 0.0};
    j[1] = {-v * v * s * s / (u * u * u), v * s * s / (u * u), v * v * s / (u * u)};
    j[2] = {0.0, 0.0, 1.0};
    return j;
}

double invariant_density(double u, double v, double x) {
    require_positive_uv(u, v);
    require_nonnegative(x, "invariant_density");
    return (v / u) * specfun::normal_pdf(v * x / u - v) / specfun::normal_cdf(v);
}

double invariant_density(const ReparamUV& q, double x) { return invariant_density(q.u, q.v, x); }

double invariant_cdf(double u, double v, double x) {
    require_positive_uv(u, v);
    if (x <= 0.0) return 0.0;
    // (Phi(v x/u - v) - Phi(-v)) / Phi(v), written with upper tails so the
    // difference does not cancel for large arguments.
    const double z = v * x / u - v;
    if (z > 0.0) return 1.0 - specfun::normal_sf(z) / specfun::normal_cdf(v);
    return (specfun::normal_cdf(z) - specfun::normal_sf(v)) / specfun::normal_cdf(v);
}

double speed_measure(const ReparamUV& q, double x) {
    q.validate();
    require_nonnegative(x, "speed_measure");
    const double v2 = q.v * q.v;
    const double r = x / q.u;
    return 2.0 / (q.sigma * q.sigma) * std::exp(-0.5 * v2 + v2 * r - 0.5 * v2 * r * r);
}

double g1(double u, double v) {
    require_positive_uv(u, v);
    return u + (u / v) * specfun::normal_hazard(v);
}

double g2(double u, double v) {
    require_positive_uv(u, v);
    return u * u / (v * v) + u * u + (u * u / v) * specfun::normal_hazard(v);
}

Mat2 g12_jacobian(double u, double v) {
    require_positive_uv(u, v);
    const double r = specfun::normal_hazard(v);
    // r'(v) = -r (v + r); d(r/v)/dv = r'/v - r/v^2.
    const double dr = -r * (v + r);
    const double d_rv = dr / v - r / (v * v);
    Mat2 j{};
    j[0][0] = 1.0 + r / v;
    j[0][1] = u * d_rv;
    j[1][0] = 2.0 * u / (v * v) + 2.0 * u + 2.0 * u * r / v;
    j[1][1] = -2.0 * u * u / (v * v * v) + u * u * d_rv;
    return j;
}

double stationary_window(double u, double v, double sds) {
    require_positive_uv(u, v);
    return u + sds * u / v;
}

}  // namespace rou
