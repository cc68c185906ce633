#ifndef PARABOLIC_FIELD_HPP
#define PARABOLIC_FIELD_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "anisotropy.hpp"
#include "core.hpp"
#include "polar.hpp"
#include "sphere.hpp"

namespace parabolic {

/// Regularity class of a field, measured with respect to ρ.
enum class Smoothness { smooth, lipschitz, holder, log_singular, indicator };

inline const char* to_string(Smoothness s)
{
    switch (s) {
    case Smoothness::smooth: return "smooth";
    case Smoothness::lipschitz: return "lipschitz";
    case Smoothness::holder: return "holder";
    case Smoothness::log_singular: return "log_singular";
    case Smoothness::indicator: return "indicator";
    }
    return "unknown";
}

/// ρ-Lipschitz or better: |f(x) - f(y)| <= C ρ(x - y) locally.
inline bool is_lipschitz(Smoothness s) { return s == Smoothness::smooth || s == Smoothness::lipschitz; }

/// Real-valued function on ℝⁿ with the metadata quadrature needs: an
/// optional support ellipsoid (f = 0 outside), ellipsoids where f vanishes,
/// and the interfaces and singular points where f is not smooth.
class ScalarField {
public:
    using Function = std::function<double(const Point&)>;

    ScalarField() = default;

    ScalarField(std::string name, Function fn, Smoothness hint, Point center,
                std::optional<Ellipsoid> support = std::nullopt, PolarFeatures features = {})
        : name_(std::move(name)),
          fn_(std::move(fn)),
          hint_(hint),
          center_(std::move(center)),
          support_(std::move(support)),
          features_(std::move(features))
    {
        if (!fn_) throw invalid_input("field '" + name_ + "' has no function");
        if (support_ && !(support_->radius > 0.0)) throw invalid_input("support radius must be positive");
    }

    double operator()(const Point& y) const { return fn_(y); }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] Smoothness hint() const noexcept { return hint_; }
    [[nodiscard]] const Point& center() const noexcept { return center_; }
    [[nodiscard]] const std::optional<Ellipsoid>& support() const noexcept { return support_; }
    [[nodiscard]] double support_radius() const noexcept { return support_ ? support_->radius : kInf; }
    [[nodiscard]] const PolarFeatures& features() const noexcept { return features_; }
    [[nodiscard]] const std::vector<Ellipsoid>& zero_regions() const noexcept { return zero_regions_; }
    [[nodiscard]] bool identically_zero() const noexcept { return zero_; }
    [[nodiscard]] const std::optional<double>& constant_value() const noexcept { return constant_; }

    ScalarField& add_zero_region(const Ellipsoid& e)
    {
        zero_regions_.push_back(e);
        return *this;
    }
    ScalarField& mark_constant(double c)
    {
        constant_ = c;
        zero_ = c == 0.0;
        return *this;
    }

private:
    std::string name_;
    Function fn_;
    Smoothness hint_ = Smoothness::smooth;
    Point center_;
    std::optional<Ellipsoid> support_;
    PolarFeatures features_;
    std::vector<Ellipsoid> zero_regions_;
    std::optional<double> constant_;
    bool zero_ = false;
};

// ---------------------------------------------------------------------------
// Builtins
// ---------------------------------------------------------------------------

/// Name and parameters of a builtin field.
struct FieldSpec {
    std::string name = "constant";
    double R = 1.0;         // indicator_ellipsoid, bump
    double beta = 1.0;      // rho_power
    double value = 1.0;     // constant
    int index = 1;          // coordinate, 1-based
    std::vector<double> center;  // empty means the origin
};

inline ScalarField indicator_ellipsoid(const AnisotropicStructure& s, const Point& center, double R)
{
    if (!(R > 0.0)) throw invalid_input("indicator_ellipsoid: R must be positive");
    const Ellipsoid e{center, R};
    PolarFeatures feat;
    feat.interfaces.push_back(e);
    return ScalarField(
        "indicator_ellipsoid", [s, center, R](const Point& y) { return s.rho_unchecked(y - center) < R ? 1.0 : 0.0; },
        Smoothness::indicator, center, e, feat);
}

/// exp(1 - 1/(1 - (ρ(y - c)/R)²)) inside E(c, R), 0 outside; equals 1 at c.
inline ScalarField bump(const AnisotropicStructure& s, const Point& center, double R)
{
    if (!(R > 0.0)) throw invalid_input("bump: R must be positive");
    const Ellipsoid e{center, R};
    PolarFeatures feat;
    feat.interfaces.push_back(e);
    feat.singular_points.push_back(center);
    return ScalarField(
        "bump",
        [s, center, R](const Point& y) {
            const double q = s.rho_unchecked(y - center) / R;
            if (q >= 1.0) return 0.0;
            return std::exp(1.0 - 1.0 / (1.0 - q * q));
        },
        Smoothness::smooth, center, e, feat);
}

/// b(y) = ln ρ(y - c); -∞ at c.
inline ScalarField log_rho(const AnisotropicStructure& s, const Point& center)
{
    PolarFeatures feat;
    feat.singular_points.push_back(center);
    return ScalarField(
        "log_rho", [s, center](const Point& y) { return std::log(s.rho_unchecked(y - center)); },
        Smoothness::log_singular, center, std::nullopt, feat);
}

/// ρ(y - c)^β.
inline ScalarField rho_power(const AnisotropicStructure& s, const Point& center, double beta)
{
    if (!(beta > 0.0)) throw invalid_input("rho_power: beta must be positive");
    PolarFeatures feat;
    feat.singular_points.push_back(center);
    const Smoothness hint = beta >= 1.0 ? Smoothness::lipschitz : Smoothness::holder;
    if (beta == 1.0) {
        return ScalarField(
            "rho_power", [s, center](const Point& y) { return s.rho_unchecked(y - center); }, hint, center,
            std::nullopt, feat);
    }
    return ScalarField(
        "rho_power", [s, center, beta](const Point& y) { return std::pow(s.rho_unchecked(y - center), beta); },
        hint, center, std::nullopt, feat);
}

inline ScalarField constant_field(std::size_t dim, double c)
{
    ScalarField f("constant", [c](const Point&) { return c; }, Smoothness::smooth, zero_point(dim));
    f.mark_constant(c);
    return f;
}

/// b(y) = y_i (1-based index).
inline ScalarField coordinate_field(std::size_t dim, int index)
{
    if (index < 1 || static_cast<std::size_t>(index) > dim) {
        throw invalid_input("coordinate index " + std::to_string(index) + " out of range");
    }
    const std::size_t i = static_cast<std::size_t>(index - 1);
    return ScalarField("coordinate", [i](const Point& y) { return y[i]; }, Smoothness::smooth, zero_point(dim));
}

inline ScalarField builtin_field(const AnisotropicStructure& s, const FieldSpec& spec)
{
    Point center = zero_point(s.dim());
    if (!spec.center.empty()) {
        if (spec.center.size() != s.dim()) throw invalid_input("field center has wrong dimension");
        center = Point::from(spec.center);
        if (!center.finite()) throw invalid_input("field center must be finite");
    }
    if (spec.name == "indicator_ellipsoid") return indicator_ellipsoid(s, center, spec.R);
    if (spec.name == "bump") return bump(s, center, spec.R);
    if (spec.name == "log_rho") return log_rho(s, center);
    if (spec.name == "rho_power") return rho_power(s, center, spec.beta);
    if (spec.name == "constant") return constant_field(s.dim(), spec.value);
    if (spec.name == "coordinate") return coordinate_field(s.dim(), spec.index);
    throw invalid_input("unknown field '" + spec.name + "'");
}

// ---------------------------------------------------------------------------
// Combinators
// ---------------------------------------------------------------------------

inline Smoothness worst(Smoothness a, Smoothness b) { return static_cast<int>(a) > static_cast<int>(b) ? a : b; }

/// f·g. The support is the smaller of the two declared supports.
inline ScalarField product(const ScalarField& f, const ScalarField& g)
{
    std::optional<Ellipsoid> support = f.support();
    if (g.support() && (!support || g.support()->radius < support->radius)) support = g.support();
    PolarFeatures feat = f.features();
    feat.merge(g.features());
    ScalarField out(
        f.name() + "*" + g.name(), [f, g](const Point& y) { return f(y) * g(y); }, worst(f.hint(), g.hint()),
        support ? support->center : f.center(), support, feat);
    for (const Ellipsoid& e : f.zero_regions()) out.add_zero_region(e);
    for (const Ellipsoid& e : g.zero_regions()) out.add_zero_region(e);
    if (f.identically_zero() || g.identically_zero()) out.mark_constant(0.0);
    return out;
}

/// c·f.
inline ScalarField scaled(const ScalarField& f, double c)
{
    ScalarField out(
        f.name(), [f, c](const Point& y) { return c * f(y); }, f.hint(), f.center(), f.support(), f.features());
    for (const Ellipsoid& e : f.zero_regions()) out.add_zero_region(e);
    if (c == 0.0 || f.identically_zero()) out.mark_constant(0.0);
    else if (f.constant_value()) out.mark_constant(c * *f.constant_value());
    return out;
}

/// f + c. Drops the support, since f + c need not vanish anywhere.
inline ScalarField offset(const ScalarField& f, double c)
{
    ScalarField out(
        f.name(), [f, c](const Point& y) { return f(y) + c; }, f.hint(), f.center(), std::nullopt, f.features());
    if (f.constant_value()) out.mark_constant(*f.constant_value() + c);
    return out;
}

/// y ↦ f(y - z).
inline ScalarField shifted(const ScalarField& f, const Point& z)
{
    PolarFeatures feat;
    for (Ellipsoid e : f.features().interfaces) {
        e.center += z;
        feat.interfaces.push_back(e);
    }
    for (const Point& p : f.features().singular_points) feat.singular_points.push_back(p + z);
    std::optional<Ellipsoid> support = f.support();
    if (support) support->center += z;
    ScalarField out(
        f.name(), [f, z](const Point& y) { return f(y - z); }, f.hint(), f.center() + z, support, feat);
    for (Ellipsoid e : f.zero_regions()) {
        e.center += z;
        out.add_zero_region(e);
    }
    if (f.constant_value()) out.mark_constant(*f.constant_value());
    return out;
}

/// f·χ_{ℝⁿ \ E}: the far part f₂ of the split f = f₁ + f₂.
inline ScalarField restricted_outside(const AnisotropicStructure& s, const ScalarField& f, const Ellipsoid& e)
{
    PolarFeatures feat = f.features();
    feat.interfaces.push_back(e);
    const Smoothness hint = f.identically_zero() ? f.hint() : Smoothness::indicator;
    ScalarField out(
        f.name() + "|outside",
        [s, f, e](const Point& y) { return s.rho_unchecked(e.center - y) < e.radius ? 0.0 : f(y); }, hint,
        f.center(), f.support(), feat);
    for (const Ellipsoid& z : f.zero_regions()) out.add_zero_region(z);
    out.add_zero_region(e);
    if (f.identically_zero()) out.mark_constant(0.0);
    return out;
}

/// f·χ_E: the near part f₁.
inline ScalarField restricted_inside(const AnisotropicStructure& s, const ScalarField& f, const Ellipsoid& e)
{
    PolarFeatures feat = f.features();
    feat.interfaces.push_back(e);
    std::optional<Ellipsoid> support = e;
    if (f.support() && f.support()->radius < e.radius) support = f.support();
    ScalarField out(
        f.name() + "|inside",
        [s, f, e](const Point& y) { return s.rho_unchecked(e.center - y) < e.radius ? f(y) : 0.0; },
        f.identically_zero() ? f.hint() : Smoothness::indicator, support->center, support, feat);
    for (const Ellipsoid& z : f.zero_regions()) out.add_zero_region(z);
    if (f.identically_zero()) out.mark_constant(0.0);
    return out;
}

// ---------------------------------------------------------------------------
// Quadrature over ellipsoids
// ---------------------------------------------------------------------------

struct QuadratureOptions {
    std::size_t azimuth_nodes = 0;  // 0: default for the dimension
    int order = 16;
    bool refinement_check = true;
    double tolerance = 1e-5;
    int subcells = 16;
};

namespace detail {

/// (∫_{E(x0, r)} g(f(y)) dy, ∫ |g(f(y))| dy) at one resolution.
template <class G>
std::pair<double, double> ellipsoid_integral_once(const AnisotropicStructure& s, const ScalarField& f, const Point& x0, double r,
                               std::size_t azimuth_nodes, int order, int subcells, G&& g)
{
    const SphereRule rule = make_sphere_rule(s.dim(), azimuth_nodes);
    RadialPlan plan;
    plan.edges = {0.0, r};
    plan.order = order;
    plan.subcells = subcells;
    PolarFeatures feat = f.features();
    if (f.support()) feat.interfaces.push_back(*f.support());
    // Grade toward the center when f is singular there.
    if (f.hint() == Smoothness::log_singular || f.hint() == Smoothness::holder) {
        for (const Point& p : f.features().singular_points) {
            if (s.rho_unchecked(p - x0) == 0.0) {
                plan.edges = geometric_edges(r * 1e-6, r, 4.0);
                plan.edges.insert(plan.edges.begin(), 0.0);
                break;
            }
        }
    }
    struct Visitor {
        const ScalarField& f;
        G& g;
        double sum = 0.0;
        double abs_sum = 0.0;
        void ray(const Point&) {}
        void node(const Point& y, double, double weight, std::size_t)
        {
            const double v = g(f(y)) * weight;
            sum += v;
            abs_sum += std::abs(v);
        }
    } v{f, g};
    for_each_polar_node(s, rule, x0, plan, feat, v);
    return {v.sum, v.abs_sum};
}

template <class G>
double ellipsoid_integral(const AnisotropicStructure& s, const ScalarField& f, const Point& x0, double r,
                          const QuadratureOptions& opt, G&& g)
{
    s.check_dim(x0);
    if (!(r > 0.0) || !std::isfinite(r)) throw invalid_input("ellipsoid radius must be positive");
    if (!x0.finite()) throw invalid_input("ellipsoid center must be finite");
    if (f.identically_zero()) return 0.0;
    const std::size_t az = opt.azimuth_nodes ? opt.azimuth_nodes : default_azimuth_nodes(s.dim());
    const auto [coarse, coarse_abs] = ellipsoid_integral_once(s, f, x0, r, az, opt.order, opt.subcells, g);
    if (!opt.refinement_check) return coarse;
    const double fine =
        ellipsoid_integral_once(s, f, x0, r, 2 * az, opt.order + opt.order / 2, opt.subcells, g).first;
    // Integrals that cancel to nearly zero are compared against ∫|g|.
    const double scale = 1e-6 * coarse_abs;
    if (relative_difference(coarse, fine, scale) > opt.tolerance) {
        throw accuracy_error("ellipsoid quadrature did not converge", coarse, fine);
    }
    return fine;
}

} // namespace detail

/// ∫_{E(x0, r)} f(y) dy by polar quadrature centered at x0.
inline double integrate_ellipsoid(const AnisotropicStructure& s, const ScalarField& f, const Point& x0, double r,
                                  const QuadratureOptions& opt = {})
{
    return detail::ellipsoid_integral(s, f, x0, r, opt, [](double v) { return v; });
}

/// ‖f‖_{L_p(E(x0, r))}.
inline double lp_norm_ellipsoid(const AnisotropicStructure& s, const ScalarField& f, double p, const Point& x0,
                                double r, const QuadratureOptions& opt = {})
{
    if (!(p >= 1.0) || !std::isfinite(p)) throw invalid_input("lp_norm_ellipsoid: p must be in [1, inf)");
    const double integral =
        p == 1.0 ? detail::ellipsoid_integral(s, f, x0, r, opt, [](double v) { return std::abs(v); })
                 : detail::ellipsoid_integral(s, f, x0, r, opt, [p](double v) { return std::pow(std::abs(v), p); });
    return std::pow(integral, 1.0 / p);
}

} // namespace parabolic

#endif // PARABOLIC_FIELD_HPP
