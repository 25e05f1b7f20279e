#pragma once

#include <cmath>
#include <vector>

namespace magwell {

/// Gauss-Legendre rule on [0,1]; nodes/weights computed once per order by
/// Newton iteration on the Legendre polynomial and cached.
struct GaussRule {
    std::vector<double> nodes;   // in (0,1)
    std::vector<double> weights; // sum to 1
};

const GaussRule& gauss_rule(int order);

/// integral of f over [a,b] with a single panel of the given order
template <class F>
double gauss_integrate(F&& f, double a, double b, int order) {
    const GaussRule& rule = gauss_rule(order);
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        s += rule.weights[i] * f(a + (b - a) * rule.nodes[i]);
    return (b - a) * s;
}

/// composite version: panels of width at most max_panel
template <class F>
double gauss_integrate_composite(F&& f, double a, double b, int order, double max_panel) {
    double len = std::abs(b - a);
    int panels = std::max(1, static_cast<int>(std::ceil(len / max_panel)));
    double s = 0.0;
    for (int p = 0; p < panels; ++p) {
        double x0 = a + (b - a) * p / panels;
        double x1 = a + (b - a) * (p + 1) / panels;
        s += gauss_integrate(f, x0, x1, order);
    }
    return s;
}

} // namespace magwell
