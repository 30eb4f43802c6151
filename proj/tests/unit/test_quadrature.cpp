#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rou/quadrature.hpp"

using namespace rou::quad;

TEST_CASE("gauss_legendre is exact for polynomials up to degree 2n - 1") {
    for (int n : {1, 2, 5, 20}) {
        const GaussRule rule = gauss_legendre(n);
        REQUIRE(rule.nodes.size() == static_cast<std::size_t>(n));
        for (int deg = 0; deg <= 2 * n - 1; ++deg) {
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += rule.weights[k] * std::pow(rule.nodes[k], deg);
            const double want = deg % 2 ? 0.0 : 2.0 / (deg + 1);
            CAPTURE(n);
            CAPTURE(deg);
            CHECK(std::abs(s - want) < 1e-13);
        }
    }
}

TEST_CASE("panel rule has 20 points and weights summing to 2") {
    const GaussRule& r = panel_rule();
    CHECK(r.nodes.size() == 20);
    double total = 0.0;
    for (double w : r.weights) total += w;
    CHECK(total == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("integrate handles smooth and peaked integrands") {
    CHECK(integrate([](double x) { return std::exp(-x * x); }, 0.0, 10.0) ==
          doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-12));
    CHECK(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(integrate([](double x) { return 1.0 / (1e-4 + (x - 0.3) * (x - 0.3)); }, 0.0, 1.0, 1e-10) ==
          doctest::Approx(100.0 * (std::atan(70.0) + std::atan(30.0))).epsilon(1e-9));
}

TEST_CASE("vector integrands share nodes") {
    auto f = [](double x, std::span<double> out) {
        out[0] = 1.0;
        out[1] = x;
        out[2] = x * x;
    };
    const auto v = integrate_doubling(f, -1.0, 2.0, 3);
    CHECK(v[0] == doctest::Approx(3.0));
    CHECK(v[1] == doctest::Approx(1.5));
    CHECK(v[2] == doctest::Approx(3.0));
}

TEST_CASE("integrate reports non-convergence") {
    CHECK_THROWS_AS(integrate([](double x) { return std::sin(1.0 / x); }, 1e-9, 1.0, 1e-14), rou::ConvergenceError);
}
