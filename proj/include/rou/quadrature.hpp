#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "rou/errors.hpp"

namespace rou::quad {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre(int order);

/// The 20-point rule used for every composite panel.
const GaussRule& panel_rule();

/// Composite Gauss-Legendre over `panels` equal panels of [a, b]. `f(x, out)`
/// writes one value per integrand into `out` (size `width`).
template <typename F>
std::vector<double> integrate_panels(F&& f, double a, double b, int panels, std::size_t width) {
    const GaussRule& rule = panel_rule();
    std::vector<double> total(width, 0.0);
    std::vector<double> values(width, 0.0);
    const double len = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * len;
        const double mid = lo + 0.5 * len;
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            const double x = mid + 0.5 * len * rule.nodes[k];
            f(x, std::span<double>(values));
            const double w = 0.5 * len * rule.weights[k];
            for (std::size_t j = 0; j < width; ++j) total[j] += w * values[j];
        }
    }
    return total;
}

/// Panel doubling (starting at 4 panels) until every component changes by
/// less than tol * max(1, |value|) between successive refinements.
template <typename F>
std::vector<double> integrate_doubling(F&& f, double a, double b, std::size_t width, double tol = 1e-10,
                                       int max_panels = 4096) {
    int panels = 4;
    std::vector<double> prev = integrate_panels(f, a, b, panels, width);
    while (panels < max_panels) {
        panels *= 2;
        std::vector<double> next = integrate_panels(f, a, b, panels, width);
        bool done = true;
        for (std::size_t j = 0; j < width; ++j) {
            if (std::abs(next[j] - prev[j]) >= tol * std::max(1.0, std::abs(next[j]))) done = false;
        }
        if (done) return next;
        prev = std::move(next);
    }
    throw ConvergenceError("quadrature: no convergence with " + std::to_string(max_panels) + " panels");
}

/// Scalar convenience wrapper around integrate_doubling.
template <typename F>
double integrate(F&& f, double a, double b, double tol = 1e-10) {
    auto wrapped = [&f](double x, std::span<double> out) { out[0] = f(x); };
    return integrate_doubling(wrapped, a, b, 1, tol)[0];
}

}  // namespace rou::quad
