#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "rou/errors.hpp"
#include "rou/model.hpp"
#include "rou/quadrature.hpp"
#include "rou/specfun.hpp"
#include "rou/spectral.hpp"

using namespace rou;

namespace {

const double kV0 = 2.0 * std::numbers::sqrt2;

struct Case {
    double u;
    double v;
};

const Case kCases[] = {{1.0, kV0}, {0.5, 1.0}, {2.0, 5.0}, {1.0, 0.3}, {3.0, 7.5}};

// Independent root finder: fixed step 1e-3 in the order, then plain bisection.
std::vector<double> dense_scan_orders(double v, int n) {
    const double x = -v / std::numbers::sqrt2;
    std::vector<double> roots;
    // H_0 = 1; for large v the first root lies just above zero.
    double lo = 0.0;
    double f_lo = 1.0;
    while (static_cast<int>(roots.size()) < n) {
        const double hi = lo + 1e-3;
        const double f_hi = specfun::hermite(hi, x);
        if ((f_lo < 0) != (f_hi < 0)) {
            double a = lo, b = hi, fa = f_lo;
            for (int k = 0; k < 60; ++k) {
                const double m = 0.5 * (a + b);
                const double fm = specfun::hermite(m, x);
                if ((fm < 0) == (fa < 0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        lo = hi;
        f_lo = f_hi;
    }
    return roots;
}

double window(const SpectralBasis& b) { return stationary_window(b.u(), b.v(), 12.0); }

}  // namespace

TEST_CASE("boundary orders agree with a dense scan") {
    for (const Case& c : kCases) {
        const std::vector<double> fast = solve_boundary_orders(c.v);
        const std::vector<double> slow = dense_scan_orders(c.v, 12);
        REQUIRE(fast.size() == 12);
        for (int i = 0; i < 12; ++i) {
            CAPTURE(c.v);
            CAPTURE(i);
            // Compared as eigenvalue orders (root + 1), the quantity the basis uses.
            CHECK(std::abs(fast[i] - slow[i]) <= 1e-8 * (slow[i] + 1.0));
        }
    }
}

TEST_CASE("eigenvalues are simple, ordered and certified") {
    for (const Case& c : kCases) {
        const SpectralBasis b = SpectralBasis::build(c.u, c.v);
        const auto lam = b.lambdas_tilde();
        const auto ord = b.orders();
        const double x = -c.v / std::numbers::sqrt2;
        REQUIRE(b.size() == 12);
        for (int i = 0; i < 12; ++i) {
            CAPTURE(c.v);
            CAPTURE(i);
            CHECK(lam[i] > 0.0);
            if (i > 0) CHECK(lam[i] > lam[i - 1]);
            CHECK(ord[i] == doctest::Approx(2 * c.u * c.u * lam[i] / (c.v * c.v)).epsilon(1e-14));
            // Scaled residual of the boundary condition at nu = order - 1.
            const double mu = ord[i] - 1.0;
            const double scale = std::abs(specfun::hermite(mu - 0.05, x)) + std::abs(specfun::hermite(mu + 0.05, x));
            CHECK(std::abs(specfun::hermite(mu, x)) / scale < 1e-9);
            CHECK(b.delta()[i] != 0.0);
            CHECK(std::isfinite(b.norm_constants()[i]));
            CHECK(b.norm_constants()[i] != 0.0);
        }
        // H alternates in sign at midpoints between consecutive roots.
        for (int i = 0; i + 2 < 12; ++i) {
            const double m1 = 0.5 * (ord[i] + ord[i + 1]) - 1.0;
            const double m2 = 0.5 * (ord[i + 1] + ord[i + 2]) - 1.0;
            CHECK((specfun::hermite(m1, x) < 0) != (specfun::hermite(m2, x) < 0));
        }
    }
    const auto lam = solve_eigenvalues(1.0, kV0, 12);
    CHECK(lam[0] == doctest::Approx(kV0 * kV0 / 2 * 1.0178816973).epsilon(1e-9));
    CHECK(lam[11] == doctest::Approx(kV0 * kV0 / 2 * 16.8649814082).epsilon(1e-9));
    CHECK_THROWS_AS(solve_eigenvalues(-1.0, 1.0, 3), DomainError);
    CHECK_THROWS_AS(SpectralBasis::build(1.0, 0.0), DomainError);
}

TEST_CASE("eigenfunctions are orthonormal in L2(m)") {
    for (const Case& c : kCases) {
        const SpectralBasis b = SpectralBasis::build(c.u, c.v);
        const int n = b.size();
        for (double sigma : {0.5, 1.7}) {
            const ReparamUV q{c.u, c.v, sigma};
            auto f = [&](double x, std::span<double> out) {
                std::vector<double> phi(n);
                for (int i = 0; i < n; ++i) phi[i] = eigenfunction(b, i + 1, sigma, x);
                const double m = speed_measure(q, x);
                std::size_t k = 0;
                for (int i = 0; i < n; ++i) {
                    for (int j = i; j < n; ++j) out[k++] = phi[i] * phi[j] * m;
                }
            };
            const auto gram = quad::integrate_doubling(f, 0.0, window(b), n * (n + 1) / 2, 1e-10);
            double worst = 0.0;
            std::size_t k = 0;
            for (int i = 0; i < n; ++i) {
                for (int j = i; j < n; ++j) worst = std::max(worst, std::abs(gram[k++] - (i == j ? 1.0 : 0.0)));
            }
            CAPTURE(c.u);
            CAPTURE(c.v);
            CAPTURE(sigma);
            CHECK(worst < 1e-4);
        }
    }
}

TEST_CASE("eigenfunctions satisfy the reflecting boundary condition") {
    for (const Case& c : kCases) {
        const SpectralBasis b = SpectralBasis::build(c.u, c.v);
        const double d = 1e-5 * c.u;
        for (int i = 1; i <= b.size(); ++i) {
            const double f0 = eigenfunction(b, i, 1.0, 0.0);
            CHECK(f0 > 0.0);
            double scale = 0.0;
            for (double x = 0.0; x <= window(b); x += window(b) / 200) scale = std::max(scale, std::abs(eigenfunction(b, i, 1.0, x)));
            // One-sided second-order difference.
            const double slope = (-3 * f0 + 4 * eigenfunction(b, i, 1.0, d) - eigenfunction(b, i, 1.0, 2 * d)) / (2 * d);
            CAPTURE(c.v);
            CAPTURE(i);
            CHECK(std::abs(slope) * c.u < 1e-3 * scale);
        }
    }
    const SpectralBasis b = SpectralBasis::build(1.0, kV0);
    CHECK_THROWS_AS(eigenfunction(b, 0, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(eigenfunction(b, 13, 1.0, 0.5), DomainError);
    CHECK_THROWS_AS(eigenfunction(b, 1, 1.0, -0.5), DomainError);
}

TEST_CASE("eigenfunction scales linearly in sigma") {
    const SpectralBasis b = SpectralBasis::build(1.0, kV0);
    for (int i = 1; i <= 12; ++i) {
        CHECK(eigenfunction(b, i, 0.3, 0.9) == doctest::Approx(0.3 * eigenfunction(b, i, 1.0, 0.9)).epsilon(1e-14));
    }
}

TEST_CASE("truncated kernel: detailed balance, mass and long-time limit") {
    const SpectralBasis b = SpectralBasis::build(1.0, kV0);
    const double sigma = 0.5;
    const double h = 0.5;
    for (double x = 0.0; x <= 3.0; x += 0.25) {
        for (double y = 0.0; y <= 3.0; y += 0.25) {
            const double lhs = invariant_density(1.0, kV0, x) * transition_density(b, sigma, h, x, y);
            const double rhs = invariant_density(1.0, kV0, y) * transition_density(b, sigma, h, y, x);
            CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(std::abs(lhs), 1e-300));
        }
    }
    for (double x = 0.2; x <= 3.0 + 1e-12; x += 0.2) {
        const double mass = quad::integrate([&](double y) { return transition_density(b, sigma, h, x, y); }, 0.0, window(b));
        CAPTURE(x);
        CHECK(std::abs(mass - 1.0) < 5e-3);
    }
    double worst = 0.0;
    for (double x : {0.1, 1.0, 2.0}) {
        for (double y = 0.0; y <= window(b); y += 0.05) {
            worst = std::max(worst, std::abs(transition_density(b, sigma, 50.0, x, y) - invariant_density(1.0, kV0, y)));
        }
    }
    CHECK(worst < 1e-10);
    CHECK(std::abs(g3(b, sigma, 50.0) - g1(1.0, kV0) * g1(1.0, kV0)) < 1e-9);
}

TEST_CASE("Chapman-Kolmogorov holds to truncation accuracy") {
    const SpectralBasis b = SpectralBasis::build(1.0, kV0);
    const double sigma = 0.5;
    const double h = 0.5;
    for (double x : {0.5, 1.0, 1.5}) {
        for (double y : {0.6, 1.0, 1.4}) {
            const double two_step = quad::integrate(
                [&](double z) { return transition_density(b, sigma, h, x, z) * transition_density(b, sigma, h, z, y); },
                0.0, window(b), 1e-9);
            CHECK(std::abs(two_step - transition_density(b, sigma, 2 * h, x, y)) < 1e-2);
        }
    }
}

TEST_CASE("separable g3 matches brute-force 2D quadrature") {
    const SpectralBasis b = SpectralBasis::build(1.0, kV0);
    const double hi = window(b);
    for (auto [sigma, h] : {std::pair{0.5, 0.5}, std::pair{1.0, 0.2}}) {
        // Tensor Gauss-Legendre; refine once to confirm convergence.
        auto tensor = [&](int panels) {
            std::vector<double> nodes, weights;
            quad::integrate_panels(
                [&](double x, std::span<double> out) {
                    nodes.push_back(x);
                    out[0] = 1.0;
                },
                0.0, hi, panels, 1);
            const quad::GaussRule& r = quad::panel_rule();
            const double len = hi / panels;
            for (int p = 0; p < panels; ++p) {
                for (double w : r.weights) weights.push_back(0.5 * len * w);
            }
            double total = 0.0;
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                const double x = nodes[i];
                const double px = invariant_density(1.0, kV0, x);
                double inner = 0.0;
                for (std::size_t j = 0; j < nodes.size(); ++j) {
                    inner += weights[j] * nodes[j] * transition_density(b, sigma, h, x, nodes[j]);
                }
                total += weights[i] * x * px * inner;
            }
            return total;
        };
        const double coarse = tensor(6);
        const double fine = tensor(12);
        CAPTURE(sigma);
        CHECK(std::abs(fine - coarse) < 1e-11 * fine);
        CHECK(std::abs(g3(b, sigma, h) - fine) < 1e-8 * fine);
    }
}

TEST_CASE("A and B coefficients match quadrature and the closed form for B") {
    for (const Case& c : kCases) {
        const SpectralBasis b = SpectralBasis::build(c.u, c.v);
        const double sigma = 0.8;
        const ReparamUV q{c.u, c.v, sigma};
        const double kappa = from_uv(q).kappa;
        for (int i = 1; i <= b.size(); ++i) {
            const double a = quad::integrate(
                [&](double x) { return x * invariant_density(c.u, c.v, x) * eigenfunction(b, i, sigma, x); }, 0.0, window(b), 1e-12);
            const double bb = quad::integrate(
                [&](double y) { return y * speed_measure(q, y) * eigenfunction(b, i, sigma, y); }, 0.0, window(b), 1e-12);
            const double lambda = b.lambdas_tilde()[i - 1] * sigma * sigma;
            // Green's identity with the linear test function y and phi_i'(0) = 0.
            // Written undivided: kappa - lambda_1 -> 0 as v grows.
            const double boundary = 0.5 * sigma * sigma * speed_measure(q, 0.0) * eigenfunction(b, i, sigma, 0.0);
            CAPTURE(c.v);
            CAPTURE(i);
            CHECK(std::abs(b.a_coeffs()[i - 1] * sigma - a) < 1e-12 + 1e-8 * std::abs(a));
            CHECK(std::abs(b.b_coeffs()[i - 1] / sigma - bb) < 1e-12 + 1e-8 * std::abs(bb));
            CHECK(std::abs((kappa - lambda) * bb - boundary) < 1e-12 + 1e-8 * (std::abs(boundary) + kappa * std::abs(bb)));
            CHECK(b.couplings()[i - 1] == doctest::Approx(a * bb).epsilon(1e-7));
            // Flipping phi_i flips both factors and leaves the product alone.
            CHECK((-a) * (-bb) == doctest::Approx(a * bb));
        }
    }
}

TEST_CASE("g3 derivative in sigma^2") {
    const SpectralBasis b = SpectralBasis::build(1.0, kV0);
    const double h = 0.5;
    for (double sigma : {0.1, 0.3, 0.5, 1.0, 1.5}) {
        const double s2 = sigma * sigma;
        const double e = 1e-5 * s2;
        const double fd = (g3(b, std::sqrt(s2 + e), h) - g3(b, std::sqrt(s2 - e), h)) / (2 * e);
        const double an = dg3_dsigma2(b, sigma, h);
        CAPTURE(sigma);
        CHECK(std::abs(fd - an) < 1e-6 * std::abs(an));
        CHECK(an < 0.0);
        CHECK(g3_strictly_decreasing_at(b, sigma, h));
    }
    // Reference values of the curve (1/h) dg3/dsigma^2.
    CHECK(dg3_dsigma2(b, 0.5, h) / h == doctest::Approx(-0.2995846829).epsilon(1e-8));
    CHECK(dg3_dsigma2(b, 2.0, h) / h == doctest::Approx(-1.447605604e-4).epsilon(1e-8));
    // The certificate survives exponential underflow where the plain sum is 0.
    CHECK(g3_strictly_decreasing_at(b, 60.0, h));
    CHECK(truncation_tail(b, 0.5, h) > 0.0);
    CHECK(truncation_tail(b, 0.5, h) < 1e-6);
    CHECK(g3(b, 0.5, h) == doctest::Approx(1.0787251931).epsilon(1e-9));
}

TEST_CASE("larger truncation barely moves g3") {
    SpectralOptions opts;
    opts.truncation = 24;
    const SpectralBasis b12 = SpectralBasis::build(1.0, kV0);
    const SpectralBasis b24 = SpectralBasis::build(1.0, kV0, opts);
    CHECK(b24.size() == 24);
    for (int i = 0; i < 12; ++i) CHECK(b24.lambdas_tilde()[i] == doctest::Approx(b12.lambdas_tilde()[i]).epsilon(1e-12));
    for (double sigma : {0.1, 0.5, 1.0}) {
        CHECK(std::abs(g3(b24, sigma, 0.5) - g3(b12, sigma, 0.5)) < 10 * truncation_tail(b12, sigma, 0.5));
    }
}
