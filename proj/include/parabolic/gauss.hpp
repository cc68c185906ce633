#ifndef PARABOLIC_GAUSS_HPP
#define PARABOLIC_GAUSS_HPP

#include <array>
#include <cmath>
#include <mutex>
#include <string>
#include <vector>

#include "core.hpp"

namespace parabolic {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline constexpr int kMaxGaussOrder = 256;

namespace detail {

inline GaussRule compute_gauss_legendre(int order)
{
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Tricomi initial guess, then Newton on P_n.
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[order - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[order - 1 - i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

} // namespace detail

/// Cached Gauss-Legendre rule of the given order (1..kMaxGaussOrder).
inline const GaussRule& gauss_legendre(int order)
{
    if (order < 1 || order > kMaxGaussOrder) {
        throw invalid_input("Gauss-Legendre order " + std::to_string(order) + " out of range");
    }
    static std::array<std::once_flag, kMaxGaussOrder + 1> flags;
    static std::array<GaussRule, kMaxGaussOrder + 1> rules;
    std::call_once(flags[order], [order] { rules[order] = detail::compute_gauss_legendre(order); });
    return rules[order];
}

/// Composite-free helper: integral of f over [a, b] with one Gauss panel.
template <class F>
double gauss_integrate(F&& f, double a, double b, int order)
{
    const GaussRule& g = gauss_legendre(order);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (int i = 0; i < order; ++i) sum += g.weights[i] * f(mid + half * g.nodes[i]);
    return sum * half;
}

} // namespace parabolic

#endif // PARABOLIC_GAUSS_HPP
