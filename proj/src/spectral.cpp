#include "rou/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rou/errors.hpp"
#include "rou/model.hpp"
#include "rou/quadrature.hpp"
#include "rou/specfun.hpp"

namespace rou {

namespace {

double boundary_point(double v) { return -v / std::numbers::sqrt2; }

double scaled_state(double u, double v, double x) { return (v * x / u - v) / std::numbers::sqrt2; }

// Bisection to `tol` absolute and also relative, since for large v the first
// root sits within ~e^{-v^2/2} of zero.
double refine_root(double v, double lo, double hi, double f_lo, double tol) {
    const double a = boundary_point(v);
    while (hi - lo > tol * std::min(1.0, std::abs(lo) + std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = specfun::hermite(mid, a);
        if (f_mid == 0.0) return mid;
        if ((f_mid < 0.0) == (f_lo < 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

void SpectralOptions::validate() const {
    if (truncation < 1) throw DomainError("SpectralOptions: truncation must be >= 1");
    if (!(scan_step > 0.0) || !(initial_window > 0.0) || !(max_window >= initial_window) ||
        !(bisection_tol > 0.0) || !(residual_tol > 0.0) || !(window_sds > 0.0) || !(quad_tol > 0.0)) {
        throw DomainError("SpectralOptions: invalid scan or quadrature settings");
    }
}

std::vector<double> solve_boundary_orders(double v, const SpectralOptions& opts) {
    opts.validate();
    if (!(v > 0.0)) throw DomainError("solve_boundary_orders: v must be positive");
    const double a = boundary_point(v);
    const double step = opts.scan_step;
    const auto n = static_cast<std::size_t>(opts.truncation);

    std::vector<double> roots;
    roots.reserve(n);
    double window = opts.initial_window;
    double nu = 0.0;
    double f = specfun::hermite(nu, a);
    while (roots.size() < n) {
        if (nu >= window) {
            if (window >= opts.max_window) {
                throw ConvergenceError("solve_eigenvalues: found " + std::to_string(roots.size()) + " of " +
                                       std::to_string(n) + " roots in order window [0, " +
                                       std::to_string(window) + "]");
            }
            window = std::min(2.0 * window, opts.max_window);
        }
        const double next = nu + step;
        const double f_next = specfun::hermite(next, a);
        if (!std::isfinite(f_next)) {
            throw ConvergenceError("solve_eigenvalues: H overflow at order " + std::to_string(next));
        }
        if (f_next == 0.0) {
            roots.push_back(next);
        } else if ((f < 0.0) != (f_next < 0.0) && f != 0.0) {
            roots.push_back(refine_root(v, nu, next, f, opts.bisection_tol));
        }
        nu = next;
        f = f_next;
    }

    for (double r : roots) {
        const double h0 = specfun::hermite(r, a);
        const double scale = std::abs(specfun::hermite(r - step, a)) + std::abs(specfun::hermite(r + step, a));
        if (std::abs(h0) >= opts.residual_tol * scale) {
            throw ConvergenceError("solve_eigenvalues: root at order " + std::to_string(r) +
                                   " fails scaled residual check");
        }
    }
    return roots;
}

std::vector<double> solve_eigenvalues(double u, double v, int n, const SpectralOptions& opts) {
    if (!(u > 0.0)) throw DomainError("solve_eigenvalues: u must be positive");
    SpectralOptions o = opts;
    o.truncation = n;
    std::vector<double> roots = solve_boundary_orders(v, o);
    for (double& r : roots) r = v * v * (r + 1.0) / (2.0 * u * u);
    return roots;
}

SpectralBasis SpectralBasis::build(double u, double v, const SpectralOptions& opts) {
    if (!(u > 0.0) || !(v > 0.0)) throw DomainError("SpectralBasis: u and v must be positive");
    SpectralBasis b;
    b.u_ = u;
    b.v_ = v;
    const std::vector<double> roots = solve_boundary_orders(v, opts);
    const double a = boundary_point(v);
    const double prefactor = std::pow(v / (std::numbers::sqrt2 * u), 1.5) * std::exp(0.25 * v * v);

    for (double root : roots) {
        const double order = root + 1.0;
        const double lambda = v * v * order / (2.0 * u * u);
        const double delta = specfun::hermite_dnu(root, a);
        const double h_end = specfun::hermite(order, a);
        const double product = delta * h_end;
        if (!(product > 0.0)) {
            throw ConvergenceError("SpectralBasis: non-positive normalization at order " + std::to_string(order));
        }
        const double sign = h_end > 0.0 ? 1.0 : -1.0;
        b.lambdas_.push_back(lambda);
        b.orders_.push_back(order);
        b.deltas_.push_back(delta);
        b.norms_.push_back(sign * prefactor / std::sqrt(2.0 * lambda * product));
    }

    // A_i / sigma and sigma B_i, integrated at sigma = 1.
    const ReparamUV unit{u, v, 1.0};
    const std::size_t n = b.lambdas_.size();
    auto integrand = [&](double x, std::span<double> out) {
        const double xi = scaled_state(u, v, x);
        const double pi_x = invariant_density(u, v, x);
        const double m_x = speed_measure(unit, x);
        for (std::size_t i = 0; i < n; ++i) {
            const double phi = b.norms_[i] * specfun::hermite(b.orders_[i], xi);
            out[i] = x * pi_x * phi;
            out[n + i] = x * m_x * phi;
        }
    };
    const std::vector<double> ab =
        quad::integrate_doubling(integrand, 0.0, stationary_window(u, v, opts.window_sds), 2 * n, opts.quad_tol);
    for (std::size_t i = 0; i < n; ++i) {
        b.a_.push_back(ab[i]);
        b.b_.push_back(ab[n + i]);
        b.c_.push_back(ab[i] * ab[n + i]);
    }
    return b;
}

double eigenfunction(const SpectralBasis& basis, int i, double sigma, double x) {
    if (i < 1 || i > basis.size()) {
        throw DomainError("eigenfunction: index " + std::to_string(i) + " outside 1.." + std::to_string(basis.size()));
    }
    if (!(x >= 0.0)) throw DomainError("eigenfunction: x must be >= 0");
    const auto k = static_cast<std::size_t>(i - 1);
    return sigma * basis.norm_constants()[k] *
           specfun::hermite(basis.orders()[k], scaled_state(basis.u(), basis.v(), x));
}

double transition_density(const SpectralBasis& basis, double sigma, double h, double x, double y) {
    if (!(h > 0.0)) throw DomainError("transition_density: h must be positive");
    if (!(x >= 0.0) || !(y >= 0.0)) throw DomainError("transition_density: x, y must be >= 0");
    const ReparamUV q{basis.u(), basis.v(), sigma};
    double sum = 0.0;
    for (int i = 1; i <= basis.size(); ++i) {
        const double decay = std::exp(-basis.lambdas_tilde()[i - 1] * sigma * sigma * h);
        sum += decay * eigenfunction(basis, i, sigma, x) * eigenfunction(basis, i, sigma, y);
    }
    return invariant_density(basis.u(), basis.v(), y) + speed_measure(q, y) * sum;
}

double g3(const SpectralBasis& basis, double sigma, double h) {
    if (!(sigma > 0.0) || !(h > 0.0)) throw DomainError("g3: sigma and h must be positive");
    const double mean = g1(basis.u(), basis.v());
    const auto lambdas = basis.lambdas_tilde();
    const auto c = basis.couplings();
    double sum = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) sum += std::exp(-lambdas[i] * sigma * sigma * h) * c[i];
    return mean * mean + sum;
}

double dg3_dsigma2(const SpectralBasis& basis, double sigma, double h) {
    if (!(sigma > 0.0) || !(h > 0.0)) throw DomainError("dg3_dsigma2: sigma and h must be positive");
    const auto lambdas = basis.lambdas_tilde();
    const auto c = basis.couplings();
    double sum = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        sum += lambdas[i] * std::exp(-lambdas[i] * sigma * sigma * h) * c[i];
    }
    return -h * sum;
}

bool g3_strictly_decreasing_at(const SpectralBasis& basis, double sigma, double h) {
    const auto lambdas = basis.lambdas_tilde();
    const auto c = basis.couplings();
    if (lambdas.empty()) return false;
    const double shift = lambdas[0] * sigma * sigma * h;
    double sum = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        sum += lambdas[i] * std::exp(shift - lambdas[i] * sigma * sigma * h) * c[i];
    }
    return h * sum > 0.0;
}

double truncation_tail(const SpectralBasis& basis, double sigma, double h) {
    const auto lambdas = basis.lambdas_tilde();
    const auto c = basis.couplings();
    if (lambdas.empty()) return 0.0;
    return std::exp(-lambdas.back() * sigma * sigma * h) * std::abs(c.back());
}

}  // namespace rou
