#ifndef PARABOLIC_OPERATORS_HPP
#define PARABOLIC_OPERATORS_HPP

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "anisotropy.hpp"
#include "core.hpp"
#include "field.hpp"
#include "kernel.hpp"
#include "polar.hpp"
#include "sphere.hpp"

namespace parabolic {

/// Kernel Ω, fractional order α (0 for the singular/maximal case) and the
/// commutator symbols b_1..b_m (empty for the plain operator).
struct OperatorSpec {
    RoughKernel kernel;
    double alpha = 0.0;
    std::vector<ScalarField> symbols;
};

struct OperatorOptions {
    std::size_t azimuth_nodes = 0;  // 0: 256 for n = 2, 64 for n = 3
    int order = 8;
    int subcells = 16;
    int singular_levels = 8;
    int pv_halvings = 12;
    double pv_tolerance = 1e-6;
    int dominating_panels = 16;
};

/// Log-spaced t-grid scale·10^{j/ppd}, |j| <= decades·ppd; contains t = scale.
inline std::vector<double> default_t_grid(double scale = 1.0, int ppd = 64, int decades = 3)
{
    if (!(scale > 0.0) || ppd < 1 || decades < 0) throw invalid_input("invalid t-grid parameters");
    std::vector<double> t;
    for (int j = -decades * ppd; j <= decades * ppd; ++j) {
        t.push_back(scale * std::pow(10.0, static_cast<double>(j) / ppd));
    }
    return t;
}

namespace detail {

inline const SphereRule& operator_rule(const AnisotropicStructure& s, const OperatorOptions& opt)
{
    const std::size_t az = opt.azimuth_nodes ? opt.azimuth_nodes : (s.dim() == 2 ? 256 : 64);
    return cached_sphere_rule(s.dim(), az);
}

inline void validate(const AnisotropicStructure& s, const OperatorSpec& spec, const ScalarField& f, const Point& x)
{
    s.check_dim(x);
    if (!x.finite()) throw invalid_input("evaluation point must be finite");
    if (spec.kernel.dim() != s.dim()) throw invalid_input("kernel dimension does not match structure");
    if (!(spec.alpha >= 0.0) || !(spec.alpha < s.gamma())) {
        throw invalid_input("alpha must lie in [0, gamma)");
    }
    if (f.identically_zero()) return;
    if (!f.support()) throw precondition_error("f must have compact support");
    s.check_dim(f.support()->center);
}

/// [ρ_near, ρ_far]: ρ(x - y) lies in this range whenever f(y) ≠ 0.
inline std::pair<double, double> support_range(const AnisotropicStructure& s, const ScalarField& f, const Point& x)
{
    const Ellipsoid& e = *f.support();
    const double d = s.rho_unchecked(x - e.center);
    double near = std::max(0.0, d - e.radius);
    const double far = d + e.radius;
    for (const Ellipsoid& z : f.zero_regions()) {
        const double dz = s.rho_unchecked(x - z.center);
        if (dz < z.radius) near = std::max(near, z.radius - dz);
    }
    return {near, far};
}

inline PolarFeatures integrand_features(const OperatorSpec& spec, const ScalarField& f)
{
    PolarFeatures feat = f.features();
    feat.interfaces.push_back(*f.support());
    for (const Ellipsoid& z : f.zero_regions()) feat.interfaces.push_back(z);
    for (const ScalarField& b : spec.symbols) feat.merge(b.features());
    return feat;
}

/// Distance in ρ from x to the nearest place where the integrand is not smooth.
inline double local_scale(const AnisotropicStructure& s, const PolarFeatures& feat, const Point& x, double far)
{
    double local = far;
    for (const Ellipsoid& e : feat.interfaces) {
        const double d = std::abs(s.rho_unchecked(x - e.center) - e.radius);
        if (d > 0.0) local = std::min(local, d);
    }
    for (const Point& p : feat.singular_points) {
        const double d = s.rho_unchecked(x - p);
        if (d > 0.0) local = std::min(local, d);
    }
    return std::max(local, far * 1e-9);
}

inline std::vector<double> symbol_values(const OperatorSpec& spec, const Point& x)
{
    std::vector<double> bx;
    bx.reserve(spec.symbols.size());
    for (const ScalarField& b : spec.symbols) {
        const double v = b(x);
        if (!std::isfinite(v)) {
            throw precondition_error("commutator symbol '" + b.name() + "' is not finite at the evaluation point");
        }
        bx.push_back(v);
    }
    return bx;
}

/// Accumulates Ω(w)·ρ^{power}·∏(b_i(x) - b_i(y))·(f(y) - subtract) per bin.
struct KernelVisitor {
    const OperatorSpec& spec;
    const ScalarField& f;
    const std::vector<double>& bx;
    bool absolute;
    double power;
    double subtract;
    std::vector<double>& bins;
    int int_power = 0;
    bool use_int_power = false;
    double omega = 0.0;

    KernelVisitor(const OperatorSpec& sp, const ScalarField& field, const std::vector<double>& b, bool abs_mode,
                  double pw, double sub, std::vector<double>& out)
        : spec(sp), f(field), bx(b), absolute(abs_mode), power(pw), subtract(sub), bins(out)
    {
        const double r = std::round(power);
        if (r == power && std::abs(r) <= 8.0) {
            use_int_power = true;
            int_power = static_cast<int>(r);
        }
    }

    void ray(const Point& w)
    {
        omega = spec.kernel.on_sphere(w);
        if (absolute) omega = std::abs(omega);
    }

    double rho_power(double rho) const
    {
        if (!use_int_power) return std::pow(rho, power);
        double p = 1.0;
        const int k = int_power < 0 ? -int_power : int_power;
        for (int i = 0; i < k; ++i) p *= rho;
        return int_power < 0 ? 1.0 / p : p;
    }

    void node(const Point& y, double rho, double weight, std::size_t bin)
    {
        if (omega == 0.0) return;
        double g = f(y) - subtract;
        if (g == 0.0) return;
        for (std::size_t i = 0; i < bx.size(); ++i) {
            const double d = bx[i] - spec.symbols[i](y);
            g *= absolute ? std::abs(d) : d;
        }
        if (absolute) g = std::abs(g);
        bins[bin] += omega * rho_power(rho) * g * weight;
    }
};

inline std::vector<double> integrate_bins(const AnisotropicStructure& s, const OperatorSpec& spec,
                                          const ScalarField& f, const Point& x, const std::vector<double>& bx,
                                          bool absolute, double power, double subtract, RadialPlan plan,
                                          const PolarFeatures& feat, const OperatorOptions& opt)
{
    plan.order = opt.order;
    plan.subcells = opt.subcells;
    plan.singular_levels = opt.singular_levels;
    std::vector<double> bins(plan.edges.size() - 1, 0.0);
    KernelVisitor v(spec, f, bx, absolute, power, subtract, bins);
    for_each_polar_node(s, operator_rule(s, opt), x, plan, feat, v);
    return bins;
}

inline double sum(const std::vector<double>& v)
{
    double t = 0.0;
    for (double a : v) t += a;
    return t;
}

/// Absolutely convergent kernel integral: α > 0, or x at positive distance
/// from the support of f.
inline double regular_integral(const AnisotropicStructure& s, const OperatorSpec& spec, const ScalarField& f,
                               const Point& x, bool absolute, const OperatorOptions& opt)
{
    const auto [near, far] = support_range(s, f, x);
    if (!(far > near)) return 0.0;
    const std::vector<double> bx = symbol_values(spec, x);
    const PolarFeatures feat = integrand_features(spec, f);
    const double power = spec.alpha - s.gamma();
    RadialPlan plan;
    if (near > 0.0) {
        plan.edges = geometric_edges(near, far, 2.0);
    } else {
        const double local = local_scale(s, feat, x, far);
        const int k = std::max(1, static_cast<int>(std::ceil(std::log2(far / local))) + 1);
        plan.edges.push_back(0.0);
        for (int j = k; j >= 0; --j) plan.edges.push_back(std::ldexp(far, -j));
        plan.origin_power = spec.alpha - 1.0;
    }
    return sum(integrate_bins(s, spec, f, x, bx, absolute, power, 0.0, plan, feat, opt));
}

inline void check_indicator_boundary(const AnisotropicStructure& s, const ScalarField& f, const Point& x)
{
    if (f.hint() != Smoothness::indicator) return;
    for (const Ellipsoid& e : f.features().interfaces) {
        const double d = s.rho_unchecked(x - e.center);
        if (std::abs(d - e.radius) <= 1e-12 * e.radius) {
            throw precondition_error("x lies on a jump of f; the principal value does not exist");
        }
    }
}

/// Principal value for α = 0 with x in the support of f.
inline double principal_value(const AnisotropicStructure& s, const OperatorSpec& spec, const ScalarField& f,
                              const Point& x, const OperatorOptions& opt)
{
    const auto [near, far] = support_range(s, f, x);
    const bool lipschitz_symbols =
        !spec.symbols.empty() &&
        std::all_of(spec.symbols.begin(), spec.symbols.end(), [](const ScalarField& b) { return is_lipschitz(b.hint()); });
    if (!spec.kernel.mean_zero() && !lipschitz_symbols) {
        throw precondition_error("principal value needs a mean-zero kernel (kernel '" + spec.kernel.name() +
                                 "' is not) or Lipschitz commutator symbols");
    }
    check_indicator_boundary(s, f, x);
    const double fx = f(x);
    if (!std::isfinite(fx)) throw precondition_error("f is not finite at the evaluation point");

    const std::vector<double> bx = symbol_values(spec, x);
    const PolarFeatures feat = integrand_features(spec, f);
    const double power = -s.gamma();
    const double local = local_scale(s, feat, x, far);
    const double eps0 = 0.5 * std::min(local, far);

    RadialPlan outer;
    outer.edges = geometric_edges(eps0, far, 2.0);
    const double far_part = sum(integrate_bins(s, spec, f, x, bx, false, power, 0.0, outer, feat, opt));

    const int halvings = std::max(3, opt.pv_halvings);
    RadialPlan inner;
    for (int j = halvings; j >= 0; --j) inner.edges.push_back(std::ldexp(eps0, -j));
    // Subtracting f(x) leaves the value unchanged for a mean-zero kernel and
    // removes the leading singular term; symbols already vanish at y = x.
    const double subtract = spec.symbols.empty() ? fx : 0.0;
    const std::vector<double> panels = integrate_bins(s, spec, f, x, bx, false, power, subtract, inner, feat, opt);

    // I_k = truncated integral over ρ > eps0·2^{-k}.
    std::vector<double> seq(static_cast<std::size_t>(halvings) + 1);
    seq[0] = far_part;
    for (int k = 1; k <= halvings; ++k) seq[k] = seq[k - 1] + panels[static_cast<std::size_t>(halvings - k)];
    std::vector<double> r1(seq.size()), r2(seq.size());
    for (std::size_t k = 1; k < seq.size(); ++k) r1[k] = 2.0 * seq[k] - seq[k - 1];
    for (std::size_t k = 2; k < seq.size(); ++k) r2[k] = (4.0 * r1[k] - r1[k - 1]) / 3.0;
    const double last = r2.back();
    const double prev = r2[r2.size() - 2];
    if (!(std::abs(last - prev) < opt.pv_tolerance * std::max(1.0, std::abs(last)))) {
        throw divergence_error("principal value failed the Cauchy test after " + std::to_string(halvings) +
                               " halvings (last two extrapolants " + std::to_string(prev) + ", " +
                               std::to_string(last) + ")");
    }
    return last;
}

} // namespace detail

/// M_{Ω,b⃗,α} f(x): max over t_grid of |E(x,t)|^{-1+α/γ} ∫_{E(x,t)} ∏|b_i(x)-b_i(y)| |Ω(x-y)| |f(y)| dy.
/// A lower bound of the supremum over t > 0.
inline double maximal(const AnisotropicStructure& s, const OperatorSpec& spec, const ScalarField& f, const Point& x,
                      const std::vector<double>& t_grid, const OperatorOptions& opt = {})
{
    detail::validate(s, spec, f, x);
    if (t_grid.empty()) throw invalid_input("maximal: t_grid is empty");
    for (std::size_t k = 0; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > 0.0) || !std::isfinite(t_grid[k]) || (k > 0 && !(t_grid[k] > t_grid[k - 1]))) {
            throw invalid_input("maximal: t_grid must be positive and increasing");
        }
    }
    if (f.identically_zero()) return 0.0;
    const auto [near, far] = detail::support_range(s, f, x);
    if (!(far > near)) return 0.0;
    const std::vector<double> bx = detail::symbol_values(spec, x);
    const PolarFeatures feat = detail::integrand_features(spec, f);

    // Fixed ladder of base panels that does not depend on t_grid, plus one
    // partial panel [edge, t] per t. The average at t is then a function of t
    // alone, so refining the grid can only raise the maximum.
    RadialPlan ladder;
    if (near > 0.0) {
        ladder.edges = geometric_edges(near, far, 2.0);
    } else {
        const double local = detail::local_scale(s, feat, x, far);
        const int k = std::max(1, static_cast<int>(std::ceil(std::log2(far / local))) + 1);
        ladder.edges.push_back(0.0);
        for (int j = k; j >= 0; --j) ladder.edges.push_back(std::ldexp(far, -j));
    }
    const std::vector<double> bins = detail::integrate_bins(s, spec, f, x, bx, true, 0.0, 0.0, ladder, feat, opt);
    std::vector<double> below(ladder.edges.size(), 0.0);
    for (std::size_t k = 1; k < ladder.edges.size(); ++k) below[k] = below[k - 1] + bins[k - 1];

    const double exponent = -1.0 + spec.alpha / s.gamma();
    double best = 0.0;
    for (double t : t_grid) {
        if (t <= near) continue;
        double mass = below.back();
        if (t < far) {
            const auto it = std::upper_bound(ladder.edges.begin(), ladder.edges.end(), t);
            const std::size_t k = static_cast<std::size_t>(it - ladder.edges.begin()) - 1;
            mass = below[k];
            if (t > ladder.edges[k]) {
                RadialPlan partial;
                partial.edges = {ladder.edges[k], t};
                mass += detail::integrate_bins(s, spec, f, x, bx, true, 0.0, 0.0, partial, feat, opt)[0];
            }
        }
        best = std::max(best, std::pow(s.ellipsoid_volume(t), exponent) * mass);
        if (t >= far) break;
    }
    return best;
}

/// [b⃗, T_{Ω,α}] f(x); the plain operator when spec.symbols is empty.
/// α > 0: absolutely convergent fractional integral. α = 0: principal value
/// over symmetric ρ-ball exclusions with Richardson extrapolation.
inline double commutator(const AnisotropicStructure& s, const OperatorSpec& spec, const ScalarField& f, const Point& x,
                         const OperatorOptions& opt = {})
{
    detail::validate(s, spec, f, x);
    if (f.identically_zero()) return 0.0;
    for (const ScalarField& b : spec.symbols) {
        if (b.constant_value()) return 0.0;
    }
    const auto [near, far] = detail::support_range(s, f, x);
    if (!(far > near)) return 0.0;
    if (spec.alpha > 0.0 || near > 0.0) return detail::regular_integral(s, spec, f, x, false, opt);
    return detail::principal_value(s, spec, f, x, opt);
}

/// T^P_{Ω,α} f(x) for α ∈ (0, γ).
inline double fractional_integral(const AnisotropicStructure& s, const OperatorSpec& spec, const ScalarField& f,
                                  const Point& x, const OperatorOptions& opt = {})
{
    if (!(spec.alpha > 0.0)) throw invalid_input("fractional_integral needs alpha > 0");
    if (!spec.symbols.empty()) throw invalid_input("fractional_integral takes no commutator symbols");
    return commutator(s, spec, f, x, opt);
}

/// T^P_Ω f(x) = p.v. ∫ Ω(x-y) ρ(x-y)^{-γ} f(y) dy.
inline double singular_integral(const AnisotropicStructure& s, const OperatorSpec& spec, const ScalarField& f,
                                const Point& x, const OperatorOptions& opt = {})
{
    if (spec.alpha != 0.0) throw invalid_input("singular_integral needs alpha = 0");
    if (!spec.symbols.empty()) throw invalid_input("singular_integral takes no commutator symbols");
    return commutator(s, spec, f, x, opt);
}

/// [b⃗, T̃_{|Ω|,α}](|f|)(x) = ∫ ∏|b_i(x)-b_i(y)| |Ω(x-y)| ρ(x-y)^{α-γ} |f(y)| dy.
/// For α = 0 the integral near x is summed over dyadic shells; a divergence
/// error is raised when the shell contributions stop decaying.
inline double dominating(const AnisotropicStructure& s, const OperatorSpec& spec, const ScalarField& f, const Point& x,
                         const OperatorOptions& opt = {})
{
    detail::validate(s, spec, f, x);
    if (f.identically_zero()) return 0.0;
    for (const ScalarField& b : spec.symbols) {
        if (b.constant_value()) return 0.0;
    }
    const auto [near, far] = detail::support_range(s, f, x);
    if (!(far > near)) return 0.0;
    if (spec.alpha > 0.0 || near > 0.0) return detail::regular_integral(s, spec, f, x, true, opt);

    const std::vector<double> bx = detail::symbol_values(spec, x);
    const PolarFeatures feat = detail::integrand_features(spec, f);
    const double power = -s.gamma();
    const double local = detail::local_scale(s, feat, x, far);
    const double eps0 = 0.5 * std::min(local, far);
    RadialPlan outer;
    outer.edges = geometric_edges(eps0, far, 2.0);
    const double far_part = detail::sum(detail::integrate_bins(s, spec, f, x, bx, true, power, 0.0, outer, feat, opt));

    const int panels = std::max(4, opt.dominating_panels);
    RadialPlan inner;
    for (int j = panels; j >= 0; --j) inner.edges.push_back(std::ldexp(eps0, -j));
    const std::vector<double> shells = detail::integrate_bins(s, spec, f, x, bx, true, power, 0.0, inner, feat, opt);
    // shells[panels - 1] is the outermost shell.
    std::vector<double> c(shells.rbegin(), shells.rend());
    double near_part = detail::sum(c);
    const std::size_t k = c.size();
    auto ratio = [&](std::size_t j) { return c[j - 1] > 0.0 ? c[j] / c[j - 1] : 0.0; };
    const double r_last = ratio(k - 1);
    if (ratio(k - 3) > 0.75 && ratio(k - 2) > 0.75 && r_last > 0.75) {
        throw divergence_error("dominating integral diverges at x (shell ratios approach " + std::to_string(r_last) +
                               ")");
    }
    if (r_last > 0.0) near_part += c[k - 1] * r_last / (1.0 - r_last);
    return far_part + near_part;
}

} // namespace parabolic

#endif // PARABOLIC_OPERATORS_HPP
