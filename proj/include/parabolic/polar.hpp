#ifndef PARABOLIC_POLAR_HPP
#define PARABOLIC_POLAR_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "anisotropy.hpp"
#include "core.hpp"
#include "gauss.hpp"
#include "sphere.hpp"

namespace parabolic {

/// Geometry that makes a radial integrand non-smooth: ellipsoid boundaries
/// (jumps or kinks) and isolated singular points.
struct PolarFeatures {
    std::vector<Ellipsoid> interfaces;
    std::vector<Point> singular_points;

    PolarFeatures& merge(const PolarFeatures& other)
    {
        interfaces.insert(interfaces.end(), other.interfaces.begin(), other.interfaces.end());
        singular_points.insert(singular_points.end(), other.singular_points.begin(),
                               other.singular_points.end());
        return *this;
    }
};

/// Radial discretization of a polar integral.
///
/// Nodes are produced for ρ in [edges.front(), edges.back()]; each node is
/// tagged with the index of the edge interval ("bin") containing it so that
/// callers can form cumulative integrals over E(center, edges[k]).
struct RadialPlan {
    std::vector<double> edges;
    int order = 8;
    // If finite and edges.front() == 0, the innermost panel [0, e] uses the
    // substitution ρ = e·u^{1/(β+1)}, which makes ρ^β dρ smooth in u.
    double origin_power = std::numeric_limits<double>::quiet_NaN();
    // Geometric panel refinement toward singular points crossed by a ray.
    int singular_levels = 8;
    // n = 2: sub-rays per angular cell where the interface crossing count
    // changes between neighbouring rays.
    int subcells = 16;
};

namespace detail {

struct Break {
    double rho;
    bool singular;
};

inline double illinois(const auto& g, double a, double b, double ga, double gb)
{
    for (int iter = 0; iter < 200; ++iter) {
        const double c = (a * gb - b * ga) / (gb - ga);
        const double gc = g(c);
        if (gc == 0.0) return c;
        if ((gc < 0.0) != (gb < 0.0)) {
            a = b;
            ga = gb;
        } else {
            ga *= 0.5;
        }
        b = c;
        gb = gc;
        if (std::abs(b - a) <= 1e-14 * std::max(1.0, std::abs(b))) break;
    }
    return b;
}

/// Radii ρ in (lo, hi) at which center - A_ρ w crosses the boundary of e.
inline void interface_crossings(const AnisotropicStructure& s, const Point& center, const Point& w,
                                const Ellipsoid& e, double lo, double hi, std::vector<double>& out)
{
    const std::size_t n = s.dim();
    const Point delta = e.center - center;
    const double d = s.rho_unchecked(delta);
    const double radius = e.radius;
    if (d <= 1e-15 * radius) {
        if (radius > lo && radius < hi) out.push_back(radius);
        return;
    }
    const double a = std::max(lo, d - radius);
    const double b = std::min(hi, d + radius);
    if (!(b > a)) return;
    std::array<double, kMaxDim> inv{};
    for (std::size_t i = 0; i < n; ++i) inv[i] = 1.0 / s.power(radius, i);
    auto g = [&](double r) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double q = (delta[i] + s.power(r, i) * w[i]) * inv[i];
            sum += q * q;
        }
        return sum - 1.0;
    };
    constexpr int samples = 32;
    double prev_r = a;
    double prev_g = g(a);
    for (int k = 1; k <= samples; ++k) {
        const double r = a + (b - a) * static_cast<double>(k) / samples;
        const double gr = g(r);
        if (gr == 0.0) {
            if (r > lo && r < hi) out.push_back(r);
        } else if (prev_g != 0.0 && (prev_g < 0.0) != (gr < 0.0)) {
            out.push_back(illinois(g, prev_r, r, prev_g, gr));
        }
        prev_r = r;
        prev_g = gr;
    }
}

inline double measure_power(double rho, double exponent, int int_exponent) noexcept
{
    if (int_exponent >= 0) {
        double p = 1.0;
        for (int i = 0; i < int_exponent; ++i) p *= rho;
        return p;
    }
    return std::pow(rho, exponent);
}

} // namespace detail

/// Visits every node of the polar quadrature of ∫ g(y) dy over the region
/// edges.front() <= ρ(center - y) <= edges.back(), with y = center - A_ρ w.
///
/// The visitor receives `ray(w)` once per ray and then `node(y, rho, weight,
/// bin)` per radial node, where `weight` is the full measure element
/// (radial weight · ρ^{γ-1} · J(w) · angular weight). Because y = center - A_ρ w,
/// ρ(center - y) = rho and Ω(center - y) = Ω(w).
template <class Visitor>
void for_each_polar_node(const AnisotropicStructure& s, const SphereRule& rule, const Point& center,
                         const RadialPlan& plan, const PolarFeatures& features, Visitor& visitor)
{
    const std::size_t n = s.dim();
    s.check_dim(center);
    if (rule.dim != n) throw invalid_input("sphere rule dimension does not match structure");
    const auto& edges = plan.edges;
    if (edges.size() < 2 || !(edges.front() >= 0.0)) throw invalid_input("radial plan needs edges >= 0");
    for (std::size_t k = 1; k < edges.size(); ++k) {
        if (!(edges[k] > edges[k - 1])) throw invalid_input("radial plan edges must increase");
    }
    const double lo = edges.front();
    const double hi = edges.back();
    const GaussRule& gauss = gauss_legendre(plan.order);
    const double gm1 = s.gamma() - 1.0;
    const int int_gm1 = (std::round(gm1) == gm1 && gm1 <= 16.0) ? static_cast<int>(gm1) : -1;
    const bool origin_sub = std::isfinite(plan.origin_power) && lo == 0.0;
    const double origin_exp = origin_sub ? 1.0 / (plan.origin_power + 1.0) : 1.0;
    if (origin_sub && !(plan.origin_power > -1.0)) throw invalid_input("origin power must exceed -1");

    // Singular points: radius of closest passage and direction on the sphere.
    struct Singular {
        double rho;
        Point dir;
    };
    std::vector<Singular> singular;
    bool origin_singular = false;
    for (const Point& p : features.singular_points) {
        const Point d = center - p;
        const double r = s.rho_unchecked(d);
        if (r <= 1e-14 * std::max(1.0, hi)) {
            origin_singular = true;
        } else if (r > lo && r < hi) {
            singular.push_back({r, s.dilate_unchecked(1.0 / r, d)});
        }
    }
    const double near_angle = 3.0 * std::max(rule.cell_width, 1e-3);

    auto crossings_for = [&](const Point& w, std::vector<double>& out) {
        out.clear();
        for (const Ellipsoid& e : features.interfaces) detail::interface_crossings(s, center, w, e, lo, hi, out);
    };

    std::vector<detail::Break> breaks;
    std::vector<double> graded;

    auto emit_ray = [&](const Point& w, double ang_weight, const std::vector<double>& cross) {
        visitor.ray(w);
        const double jac = s.jacobian_unchecked(w) * ang_weight;

        breaks.clear();
        for (double e : edges) breaks.push_back({e, false});
        for (double c : cross) breaks.push_back({c, false});
        for (const Singular& sp : singular) {
            double dist2 = 0.0;
            for (std::size_t i = 0; i < n; ++i) dist2 += (w[i] - sp.dir[i]) * (w[i] - sp.dir[i]);
            breaks.push_back({sp.rho, std::sqrt(dist2) < near_angle});
        }
        if (origin_singular && lo == 0.0) breaks.push_back({0.0, true});
        std::sort(breaks.begin(), breaks.end(),
                  [](const detail::Break& a, const detail::Break& b) { return a.rho < b.rho; });
        // Merge coincident breaks, keeping the singular flag.
        std::size_t m = 0;
        for (std::size_t k = 0; k < breaks.size(); ++k) {
            if (m > 0 && breaks[k].rho - breaks[m - 1].rho <= 1e-14 * std::max(1.0, breaks[k].rho)) {
                breaks[m - 1].singular = breaks[m - 1].singular || breaks[k].singular;
            } else {
                breaks[m++] = breaks[k];
            }
        }
        breaks.resize(m);

        std::size_t bin = 0;
        auto gauss_panel = [&](double a, double b, bool substitute) {
            const double half = 0.5 * (b - a);
            const double mid = 0.5 * (a + b);
            for (std::size_t i = 0; i < gauss.nodes.size(); ++i) {
                double rho;
                double drho;
                if (substitute) {
                    const double u = 0.5 * (1.0 + gauss.nodes[i]);
                    rho = b * std::pow(u, origin_exp);
                    drho = 0.5 * gauss.weights[i] * b * origin_exp * std::pow(u, origin_exp - 1.0);
                } else {
                    rho = mid + half * gauss.nodes[i];
                    drho = half * gauss.weights[i];
                }
                Point y(n);
                for (std::size_t c = 0; c < n; ++c) y[c] = center[c] - s.power(rho, c) * w[c];
                const double weight = drho * detail::measure_power(rho, gm1, int_gm1) * jac;
                visitor.node(y, rho, weight, bin);
            }
        };

        for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
            const double a = breaks[k].rho;
            const double b = breaks[k + 1].rho;
            while (bin + 2 < edges.size() && a >= edges[bin + 1]) ++bin;
            if (a == 0.0 && origin_sub) {
                gauss_panel(a, b, true);
                continue;
            }
            const bool left = breaks[k].singular;
            const bool right = breaks[k + 1].singular;
            if (!left && !right) {
                gauss_panel(a, b, false);
                continue;
            }
            graded.clear();
            const int levels = std::max(0, plan.singular_levels);
            if (left && right) {
                const double mid = 0.5 * (a + b);
                graded.push_back(a);
                for (int l = levels; l >= 1; --l) graded.push_back(a + (mid - a) * std::ldexp(1.0, -l));
                graded.push_back(mid);
                for (int l = 1; l <= levels; ++l) graded.push_back(b - (b - mid) * std::ldexp(1.0, -l));
                graded.push_back(b);
            } else if (left) {
                graded.push_back(a);
                for (int l = levels; l >= 1; --l) graded.push_back(a + (b - a) * std::ldexp(1.0, -l));
                graded.push_back(b);
            } else {
                graded.push_back(a);
                for (int l = 1; l <= levels; ++l) graded.push_back(b - (b - a) * std::ldexp(1.0, -l));
                graded.push_back(b);
            }
            for (std::size_t g = 0; g + 1 < graded.size(); ++g) {
                if (graded[g + 1] > graded[g]) gauss_panel(graded[g], graded[g + 1], false);
            }
        }
    };

    const bool subcell = n == 2 && plan.subcells > 1 && !features.interfaces.empty();
    if (!subcell) {
        std::vector<double> cross;
        for (std::size_t j = 0; j < rule.size(); ++j) {
            crossings_for(rule.nodes[j], cross);
            emit_ray(rule.nodes[j], rule.weights[j], cross);
        }
        return;
    }

    const std::size_t count = rule.size();
    std::vector<std::vector<double>> base(count);
    for (std::size_t j = 0; j < count; ++j) crossings_for(rule.nodes[j], base[j]);
    std::vector<double> cross;
    const double h = rule.cell_width;
    const int sub = plan.subcells;
    for (std::size_t j = 0; j < count; ++j) {
        const std::size_t prev = (j + count - 1) % count;
        const std::size_t next = (j + 1) % count;
        const bool split = base[prev].size() != base[j].size() || base[next].size() != base[j].size();
        if (!split) {
            emit_ray(rule.nodes[j], rule.weights[j], base[j]);
            continue;
        }
        const double theta0 = (static_cast<double>(j) + 0.5) * h - 0.5 * h;
        for (int k = 0; k < sub; ++k) {
            const Point w = circle_point(theta0 + (k + 0.5) * h / sub);
            crossings_for(w, cross);
            emit_ray(w, rule.weights[j] / sub, cross);
        }
    }
}

/// Visitor adapter that sums `g(y, rho, w)·weight` over all nodes.
template <class G>
struct SumVisitor {
    G g;
    Point w;
    double sum = 0.0;
    void ray(const Point& dir) { w = dir; }
    void node(const Point& y, double rho, double weight, std::size_t) { sum += g(y, rho, w) * weight; }
};

/// Geometric edges lo, lo·q, ..., hi with ratio at most `ratio`.
inline std::vector<double> geometric_edges(double lo, double hi, double ratio)
{
    if (!(lo > 0.0) || !(hi > lo)) throw invalid_input("geometric_edges: need 0 < lo < hi");
    const int panels = std::max(1, static_cast<int>(std::ceil(std::log(hi / lo) / std::log(ratio) - 1e-12)));
    std::vector<double> e(static_cast<std::size_t>(panels) + 1);
    for (int k = 0; k <= panels; ++k) e[k] = lo * std::pow(hi / lo, static_cast<double>(k) / panels);
    e.front() = lo;
    e.back() = hi;
    return e;
}

} // namespace parabolic

#endif // PARABOLIC_POLAR_HPP
