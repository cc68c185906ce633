#ifndef PARABOLIC_CONDITIONS_HPP
#define PARABOLIC_CONDITIONS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "gauss.hpp"
#include "spaces.hpp"

namespace parabolic {

// ---------------------------------------------------------------------------
// Grid essinf / esssup
// ---------------------------------------------------------------------------

inline void check_positive_values(const std::vector<double>& v)
{
    if (v.empty()) throw invalid_input("essinf/esssup: empty sequence");
    for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) throw invalid_input("essinf/esssup: values must be positive and finite");
    }
}

inline double essinf_grid(const std::vector<double>& v)
{
    check_positive_values(v);
    return *std::min_element(v.begin(), v.end());
}

inline double esssup_grid(const std::vector<double>& v)
{
    check_positive_values(v);
    return *std::max_element(v.begin(), v.end());
}

/// Grid surrogate of essinf_{t<τ<∞} φ₁(τ) τ^{γ/p}: minimum over t itself and
/// the grid points τ > t.
inline double tail_essinf(const RadialWeight& phi1, double p, double gamma, double t, const std::vector<double>& tau_grid)
{
    if (!(t > 0.0)) throw invalid_input("tail_essinf: t must be positive");
    double best = phi1(t) * std::pow(t, gamma / p);
    for (double tau : tau_grid) {
        if (!(tau > 0.0)) throw invalid_input("tail_essinf: grid must be positive");
        if (tau > t) best = std::min(best, phi1(tau) * std::pow(tau, gamma / p));
    }
    return best;
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

enum class Variant { theorem1_small_s, theorem1_large_s, theorem2_small_s, theorem2_large_s };

inline const char* to_string(Variant v)
{
    switch (v) {
    case Variant::theorem1_small_s: return "theorem1_small_s";
    case Variant::theorem1_large_s: return "theorem1_large_s";
    case Variant::theorem2_small_s: return "theorem2_small_s";
    case Variant::theorem2_large_s: return "theorem2_large_s";
    }
    return "unknown";
}

inline Variant variant_from_string(const std::string& name)
{
    for (Variant v : {Variant::theorem1_small_s, Variant::theorem1_large_s, Variant::theorem2_small_s,
                      Variant::theorem2_large_s}) {
        if (name == to_string(v)) return v;
    }
    throw invalid_input("unknown condition variant '" + name + "'");
}

inline bool is_fractional(Variant v) { return v == Variant::theorem2_small_s || v == Variant::theorem2_large_s; }
inline bool is_large_s(Variant v) { return v == Variant::theorem1_large_s || v == Variant::theorem2_large_s; }

/// Exponents of the (φ₁, φ₂) admissibility conditions. `morrey_lambda` is the
/// λ of the power weight φ₁ = r^{(λ-γ)/p} used by power_pair.
struct ConditionParams {
    double p = 2.0;
    double q = 2.0;
    double q1 = 2.0;
    std::vector<double> p_i;
    std::vector<double> lambda_i;
    double alpha = 0.0;
    double s = kInf;
    double gamma = 3.0;
    int m = 0;
    Variant variant = Variant::theorem1_small_s;
    double morrey_lambda = 0.0;

    /// Fills q from 1/q = Σ 1/p_i + 1/p and q1 from 1/q1 = 1/q - α/γ.
    static ConditionParams make(Variant variant, double gamma, double p, std::vector<double> p_i,
                                std::vector<double> lambda_i, double alpha = 0.0, double s = kInf,
                                double morrey_lambda = 0.0)
    {
        ConditionParams c;
        c.variant = variant;
        c.gamma = gamma;
        c.p = p;
        c.m = static_cast<int>(p_i.size());
        c.p_i = std::move(p_i);
        c.lambda_i = std::move(lambda_i);
        c.alpha = alpha;
        c.s = s;
        c.morrey_lambda = morrey_lambda;
        double inv_q = 1.0 / p;
        for (double pi : c.p_i) inv_q += 1.0 / pi;
        c.q = 1.0 / inv_q;
        const double inv_q1 = inv_q - (is_fractional(variant) ? alpha / gamma : 0.0);
        c.q1 = inv_q1 > 0.0 ? 1.0 / inv_q1 : kInf;
        c.validate();
        return c;
    }

    [[nodiscard]] double sum_lambda() const
    {
        double t = 0.0;
        for (double l : lambda_i) t += l;
        return t;
    }

    [[nodiscard]] double sum_inv_p() const
    {
        double t = 0.0;
        for (double pi : p_i) t += 1.0 / pi;
        return t;
    }

    void validate() const
    {
        if (m < 0 || p_i.size() != static_cast<std::size_t>(m) || lambda_i.size() != static_cast<std::size_t>(m)) {
            throw invalid_input("condition params: p_i and lambda_i must have m entries");
        }
        if (!(gamma > 0.0)) throw invalid_input("condition params: gamma must be positive");
        if (!(p > 1.0) || !std::isfinite(p)) throw invalid_input("condition params: p must lie in (1, inf)");
        if (!(q > 1.0) || !std::isfinite(q)) throw invalid_input("condition params: q must lie in (1, inf)");
        for (double pi : p_i) {
            if (!(pi > 1.0) || !std::isfinite(pi)) throw invalid_input("condition params: p_i must lie in (1, inf)");
        }
        for (double l : lambda_i) {
            if (!(l >= 0.0) || !(l < 1.0 / gamma)) throw invalid_input("condition params: lambda_i must lie in [0, 1/gamma)");
        }
        if (!(morrey_lambda >= 0.0) || !std::isfinite(morrey_lambda)) {
            throw invalid_input("condition params: morrey_lambda must be >= 0");
        }
        if (std::abs(1.0 / q - (sum_inv_p() + 1.0 / p)) > 1e-12) {
            throw invalid_input("condition params: 1/q must equal sum 1/p_i + 1/p");
        }
        if (!(s > 1.0)) throw invalid_input("condition params: s must lie in (1, inf]");
        const double s_prime = std::isinf(s) ? 1.0 : s / (s - 1.0);
        if (is_fractional(variant)) {
            if (!(alpha > 0.0) || !(alpha < gamma)) throw invalid_input("condition params: alpha must lie in (0, gamma)");
            if (!(q1 > 1.0) || !std::isfinite(q1)) throw invalid_input("condition params: q1 must lie in (1, inf)");
            if (std::abs(1.0 / q1 - (1.0 / q - alpha / gamma)) > 1e-12) {
                throw invalid_input("condition params: 1/q1 must equal 1/q - alpha/gamma");
            }
        }
        switch (variant) {
        case Variant::theorem1_small_s:
        case Variant::theorem2_small_s:
            if (s_prime > q + 1e-12) throw invalid_input("condition params: small-s variant needs s' <= q");
            break;
        case Variant::theorem1_large_s:
            if (!(p < s)) throw invalid_input("condition params: theorem1_large_s needs p < s");
            break;
        case Variant::theorem2_large_s:
            if (!(q1 < s)) throw invalid_input("condition params: theorem2_large_s needs q1 < s");
            break;
        }
    }

    /// e in the denominator t^{e+1}.
    [[nodiscard]] double denominator_exponent() const
    {
        const double inv_s = std::isinf(s) ? 0.0 : 1.0 / s;
        switch (variant) {
        case Variant::theorem1_small_s: return gamma * (1.0 / p - sum_lambda());
        case Variant::theorem1_large_s: return gamma * (1.0 / p - inv_s - sum_lambda());
        case Variant::theorem2_small_s: return gamma * (1.0 / q1 - sum_lambda() - sum_inv_p());
        case Variant::theorem2_large_s: return gamma * (1.0 / q1 - inv_s - sum_lambda() - sum_inv_p());
        }
        return 0.0;
    }

    /// Extra factor r^{γ/s} on the right side of the large-s variants.
    [[nodiscard]] double rhs_extra_exponent() const
    {
        return is_large_s(variant) && !std::isinf(s) ? gamma / s : 0.0;
    }

    /// Target exponent: q for the theorem1 variants, q1 for the theorem2 variants.
    [[nodiscard]] double target_exponent() const { return is_fractional(variant) ? q1 : q; }
};

// ---------------------------------------------------------------------------
// Closed forms for power weights
// ---------------------------------------------------------------------------

/// ∫_U^∞ (1+u)^m e^{-b u} du for b > 0.
inline double log_power_tail(int m, double b, double U = 0.0)
{
    if (!(b > 0.0)) return kInf;
    double falling = 1.0;  // m!/(m-j)!
    double total = 0.0;
    for (int j = 0; j <= m; ++j) {
        if (j > 0) falling *= static_cast<double>(m - j + 1);
        total += falling * std::pow(1.0 + U, m - j) / std::pow(b, j + 1);
    }
    return std::exp(-b * U) * total;
}

/// K_m(a) = ∫_0^∞ (1+u)^m e^{a u} du = Σ_j m!/(m-j)! / (-a)^{j+1}, a < 0.
inline double log_power_constant(int m, double a) { return log_power_tail(m, -a, 0.0); }

/// Exponent a such that the condition integrand for power φ₁ is (1+ln t/r)^m t^{a-1}.
inline double power_exponent(const ConditionParams& c) { return c.morrey_lambda / c.p - c.denominator_exponent(); }

/// (φ₁, φ₂) with φ₁ = r^{(λ-γ)/p} and φ₂ the exact value of the condition
/// integral (divided by r^{γ/s} for large-s variants), inflated by 1e-9 so the
/// checked ratio stays below one.
inline std::pair<RadialWeight, RadialWeight> power_pair(const ConditionParams& c)
{
    c.validate();
    const double a = power_exponent(c);
    if (!(a < 0.0)) {
        throw invalid_input("power_pair: condition integral diverges (exponent a = " + std::to_string(a) +
                            " must be negative)");
    }
    const double k = log_power_constant(c.m, a) * (1.0 + 1e-9);
    return {RadialWeight::power(c.morrey_lambda, c.p, c.gamma), RadialWeight::monomial(k, a - c.rhs_extra_exponent())};
}

// ---------------------------------------------------------------------------
// Numerical check
// ---------------------------------------------------------------------------

struct ConditionReport {
    Variant variant = Variant::theorem1_small_s;
    double sup_ratio = 0.0;
    bool divergent = false;
    std::vector<double> r_grid;
    std::vector<double> integral;  // I(r)
    std::vector<double> rhs;       // φ₂(r)·r^{γ/s} or φ₂(r)
};

namespace detail {

/// ∫_r^{t_hi} (1+ln t/r)^m ess(t) t^{-e-1} dt in u = ln(t/r), GL panels of width <= 1/2.
inline double condition_integral(const ConditionParams& c, const RadialWeight& phi1, double r, double t_hi)
{
    const double U = std::log(t_hi / r);
    if (!(U > 0.0)) return 0.0;
    const int panels = std::max(1, static_cast<int>(std::ceil(U / 0.5)));
    const GaussRule& g = gauss_legendre(10);
    const double e = c.denominator_exponent();
    std::vector<double> us;
    std::vector<double> ws;
    for (int k = 0; k < panels; ++k) {
        const double a = U * k / panels;
        const double b = U * (k + 1) / panels;
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            us.push_back(0.5 * (a + b) + 0.5 * (b - a) * g.nodes[i]);
            ws.push_back(0.5 * (b - a) * g.weights[i]);
        }
    }
    // Essinf over τ in the node set beyond each node (plus the node itself),
    // as a suffix minimum.
    std::vector<double> prod(us.size());
    for (std::size_t i = 0; i < us.size(); ++i) {
        const double t = r * std::exp(us[i]);
        prod[i] = phi1(t) * std::pow(t, c.gamma / c.p);
    }
    for (std::size_t i = prod.size(); i-- > 1;) prod[i - 1] = std::min(prod[i - 1], prod[i]);
    double total = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        const double t = r * std::exp(us[i]);
        total += ws[i] * std::pow(1.0 + us[i], c.m) * prod[i] * std::pow(t, -e);
    }
    return total;
}

} // namespace detail

/// Evaluates I(r) = ∫_r^∞ (1+ln t/r)^m essinf_{τ>t} φ₁(τ)τ^{γ/p} / t^{e+1} dt on
/// r_grid and reports sup_r I(r)/RHS(r). Power φ₁ gets an exact tail beyond
/// t_max; other weights are tested for convergence by doubling t_max.
inline ConditionReport check_condition(const ConditionParams& c, const RadialWeight& phi1, const RadialWeight& phi2,
                                       const std::vector<double>& r_grid, double t_max)
{
    c.validate();
    if (r_grid.empty()) throw invalid_input("check_condition: empty r grid");
    ConditionReport rep;
    rep.variant = c.variant;
    rep.r_grid = r_grid;
    const double e = c.denominator_exponent();
    const double extra = c.rhs_extra_exponent();
    const bool power = phi1.kind() == RadialWeight::Kind::power;
    double a = 0.0;
    if (power) {
        if (std::abs(phi1.p() - c.p) > 1e-12 || std::abs(phi1.gamma() - c.gamma) > 1e-12) {
            throw invalid_input("check_condition: power weight p/gamma differ from the condition parameters");
        }
        a = phi1.lambda() / c.p - e;
        if (!(phi1.lambda() >= 0.0)) {
            throw invalid_input("check_condition: power weights need lambda >= 0");
        }
        if (!(a < 0.0)) rep.divergent = true;
    }
    for (double r : r_grid) {
        if (!(r > 0.0)) throw invalid_input("check_condition: r must be positive");
        double value;
        if (rep.divergent) {
            value = kInf;
        } else if (power) {
            const double hi = std::max(t_max, r);
            value = detail::condition_integral(c, phi1, r, hi) +
                    std::pow(r, a) * log_power_tail(c.m, -a, std::log(hi / r));
        } else {
            // Increments over [T, 2T] must shrink geometrically; three
            // non-contracting doublings in a row count as divergence.
            double hi = std::max(t_max, 2.0 * r);
            double prev = detail::condition_integral(c, phi1, r, hi);
            double inc_prev = kInf;
            int stalled = 0;
            bool converged = false;
            for (int k = 0; k < 80 && stalled < 3; ++k) {
                hi *= 2.0;
                const double next = detail::condition_integral(c, phi1, r, hi);
                const double inc = next - prev;
                prev = next;
                if (inc <= 1e-10 * std::abs(next)) {
                    converged = true;
                    break;
                }
                stalled = inc > 0.9 * inc_prev ? stalled + 1 : 0;
                inc_prev = inc;
            }
            if (!converged) rep.divergent = true;
            value = converged ? prev : kInf;
        }
        rep.integral.push_back(value);
        rep.rhs.push_back(phi2(r) * std::pow(r, extra));
    }
    if (rep.divergent) {
        rep.sup_ratio = kInf;
        std::fill(rep.integral.begin(), rep.integral.end(), kInf);
        return rep;
    }
    for (std::size_t k = 0; k < r_grid.size(); ++k) rep.sup_ratio = std::max(rep.sup_ratio, rep.integral[k] / rep.rhs[k]);
    return rep;
}

} // namespace parabolic

#endif // PARABOLIC_CONDITIONS_HPP
