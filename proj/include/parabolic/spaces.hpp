#ifndef PARABOLIC_SPACES_HPP
#define PARABOLIC_SPACES_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "anisotropy.hpp"
#include "core.hpp"
#include "field.hpp"
#include "polar.hpp"
#include "sphere.hpp"

namespace parabolic {

/// Positive function r ↦ φ(x0, r) for a fixed x0.
class RadialWeight {
public:
    enum class Kind { power, monomial, custom };

    /// φ(r) = r^{(λ-γ)/p}.
    static RadialWeight power(double lambda, double p, double gamma)
    {
        if (!(p >= 1.0) || !std::isfinite(p)) throw invalid_input("power weight: p must be in [1, inf)");
        if (!std::isfinite(lambda) || !(gamma > 0.0)) throw invalid_input("power weight: invalid lambda or gamma");
        RadialWeight w;
        w.kind_ = Kind::power;
        w.lambda_ = lambda;
        w.p_ = p;
        w.gamma_ = gamma;
        w.coefficient_ = 1.0;
        w.exponent_ = (lambda - gamma) / p;
        w.name_ = "power";
        return w;
    }

    /// φ(r) = c·r^a.
    static RadialWeight monomial(double c, double a)
    {
        if (!(c > 0.0) || !std::isfinite(c) || !std::isfinite(a)) throw invalid_input("monomial weight: need c > 0");
        RadialWeight w;
        w.kind_ = Kind::monomial;
        w.coefficient_ = c;
        w.exponent_ = a;
        w.name_ = "monomial";
        return w;
    }

    static RadialWeight custom(std::string name, std::function<double(double)> fn)
    {
        if (!fn) throw invalid_input("custom weight needs a function");
        RadialWeight w;
        w.kind_ = Kind::custom;
        w.name_ = std::move(name);
        w.fn_ = std::move(fn);
        return w;
    }

    double operator()(double r) const
    {
        if (!(r > 0.0)) throw invalid_input("weights are defined for r > 0");
        double v = kind_ == Kind::custom ? fn_(r) : coefficient_ * std::pow(r, exponent_);
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw invalid_input("weight '" + name_ + "' is not positive and finite at r = " + std::to_string(r));
        }
        return v;
    }

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] double lambda() const noexcept { return lambda_; }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double coefficient() const noexcept { return coefficient_; }
    /// Exponent a of c·r^a (power and monomial kinds).
    [[nodiscard]] double exponent() const noexcept { return exponent_; }

private:
    Kind kind_ = Kind::power;
    std::string name_;
    double lambda_ = 0.0;
    double p_ = 1.0;
    double gamma_ = 1.0;
    double coefficient_ = 1.0;
    double exponent_ = 0.0;
    std::function<double(double)> fn_;
};

/// Named custom weights, parametrized by (γ, p):
///   constant:        1
///   inverse_volume:  r^{-γ/p}
///   log_damped:      r^{-γ/p} / (1 + ln(1 + r))
inline RadialWeight builtin_weight(const std::string& name, double gamma, double p)
{
    if (name == "constant") return RadialWeight::custom(name, [](double) { return 1.0; });
    if (name == "inverse_volume") return RadialWeight::custom(name, [gamma, p](double r) { return std::pow(r, -gamma / p); });
    if (name == "log_damped") {
        return RadialWeight::custom(
            name, [gamma, p](double r) { return std::pow(r, -gamma / p) / (1.0 + std::log1p(r)); });
    }
    throw invalid_input("unknown custom weight '" + name + "'");
}

/// Log-spaced radii r_min·10^{j/ppd} <= r_max. Doubling ppd keeps every
/// existing point.
struct RadiusGrid {
    double r_min = 1e-2;
    double r_max = 1e2;
    int ppd = 16;

    void validate() const
    {
        if (!(r_min > 0.0) || !(r_max > r_min) || !std::isfinite(r_max)) {
            throw invalid_input("radius grid needs 0 < r_min < r_max");
        }
        if (ppd < 1) throw invalid_input("radius grid needs ppd >= 1");
    }

    [[nodiscard]] std::vector<double> points() const
    {
        validate();
        const int count = static_cast<int>(std::floor(ppd * std::log10(r_max / r_min) + 1e-9));
        std::vector<double> r;
        for (int j = 0; j <= count; ++j) r.push_back(r_min * std::pow(10.0, static_cast<double>(j) / ppd));
        return r;
    }

    [[nodiscard]] RadiusGrid refined() const { return {r_min, r_max, 2 * ppd}; }
    [[nodiscard]] RadiusGrid scaled(double c) const { return {c * r_min, c * r_max, ppd}; }
};

struct SpaceOptions {
    std::size_t azimuth_nodes = 0;  // 0: 256 for n = 2, 64 for n = 3
    int order = 8;
    int subcells = 16;
    int singular_levels = 12;
};

/// Quadrature nodes of a polar sweep centered at x0, bucketed by the radius
/// bin [0, r_0], (r_0, r_1], ... they fall in. Cumulative sums over the
/// buckets give integrals over every E(x0, r_k) from one sweep.
struct PolarSample {
    std::vector<double> radii;
    std::vector<std::vector<double>> values;
    std::vector<std::vector<double>> weights;

    /// Σ_{nodes in E(x0, radii[k])} g(value)·weight.
    template <class G>
    [[nodiscard]] double cumulative(std::size_t k, G&& g) const
    {
        double s = 0.0;
        for (std::size_t b = 0; b <= k; ++b) {
            for (std::size_t i = 0; i < values[b].size(); ++i) s += g(values[b][i]) * weights[b][i];
        }
        return s;
    }

    /// Running sums of g over all radii.
    template <class G>
    [[nodiscard]] std::vector<double> profile(G&& g) const
    {
        std::vector<double> out(radii.size());
        double s = 0.0;
        for (std::size_t b = 0; b < radii.size(); ++b) {
            for (std::size_t i = 0; i < values[b].size(); ++i) s += g(values[b][i]) * weights[b][i];
            out[b] = s;
        }
        return out;
    }
};

inline PolarSample sample_polar(const AnisotropicStructure& s, const ScalarField& f, const Point& x0,
                                const std::vector<double>& radii, const SpaceOptions& opt = {})
{
    s.check_dim(x0);
    if (radii.empty()) throw invalid_input("sample_polar: no radii");
    PolarSample out;
    out.radii = radii;
    out.values.resize(radii.size());
    out.weights.resize(radii.size());
    RadialPlan plan;
    plan.edges.push_back(0.0);
    plan.edges.insert(plan.edges.end(), radii.begin(), radii.end());
    plan.order = opt.order;
    plan.subcells = opt.subcells;
    plan.singular_levels = opt.singular_levels;
    PolarFeatures feat = f.features();
    if (f.support()) feat.interfaces.push_back(*f.support());
    struct Collect {
        const ScalarField& f;
        PolarSample& out;
        void ray(const Point&) {}
        void node(const Point& y, double, double w, std::size_t bin)
        {
            out.values[bin].push_back(f(y));
            out.weights[bin].push_back(w);
        }
    } visitor{f, out};
    const std::size_t az = opt.azimuth_nodes ? opt.azimuth_nodes : (s.dim() == 2 ? 256 : 64);
    for_each_polar_node(s, cached_sphere_rule(s.dim(), az), x0, plan, feat, visitor);
    return out;
}

/// r ↦ φ(r)^{-1} |E(x0,r)|^{-1/p} ‖f‖_{L_p(E(x0,r))} on the grid.
inline std::vector<double> morrey_profile(const AnisotropicStructure& s, const ScalarField& f, double p,
                                          const RadialWeight& weight, const Point& x0, const RadiusGrid& grid,
                                          const SpaceOptions& opt = {})
{
    if (!(p >= 1.0) || !std::isfinite(p)) throw invalid_input("morrey norm: p must be in [1, inf)");
    const std::vector<double> r = grid.points();
    if (f.identically_zero()) return std::vector<double>(r.size(), 0.0);
    const PolarSample sample = sample_polar(s, f, x0, r, opt);
    const std::vector<double> integrals = sample.profile([p](double v) { return std::pow(std::abs(v), p); });
    std::vector<double> out(r.size());
    for (std::size_t k = 0; k < r.size(); ++k) {
        out[k] = std::pow(integrals[k] / s.ellipsoid_volume(r[k]), 1.0 / p) / weight(r[k]);
    }
    return out;
}

/// ‖f‖_{LM^{x0}_{p,φ}}: grid maximum of the Morrey profile (a lower bound of the sup).
inline double morrey_norm(const AnisotropicStructure& s, const ScalarField& f, double p, const RadialWeight& weight,
                          const Point& x0, const RadiusGrid& grid, const SpaceOptions& opt = {})
{
    const std::vector<double> prof = morrey_profile(s, f, p, weight, x0, grid, opt);
    return *std::max_element(prof.begin(), prof.end());
}

/// Classical form sup_r υ^{-1/p} r^{-λ/p} ‖f‖_{L_p(E(x0,r))}, equal to the
/// Morrey norm with φ = r^{(λ-γ)/p}.
inline double classical_morrey_norm(const AnisotropicStructure& s, const ScalarField& f, double p, double lambda,
                                    const Point& x0, const RadiusGrid& grid, const SpaceOptions& opt = {})
{
    const std::vector<double> r = grid.points();
    if (f.identically_zero()) return 0.0;
    const PolarSample sample = sample_polar(s, f, x0, r, opt);
    const std::vector<double> integrals = sample.profile([p](double v) { return std::pow(std::abs(v), p); });
    const double upsilon = s.unit_measure();
    double best = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        best = std::max(best, std::pow(upsilon, -1.0 / p) * std::pow(r[k], -lambda / p) * std::pow(integrals[k], 1.0 / p));
    }
    return best;
}

/// b_{E(x0,r)}.
inline double ellipsoid_mean(const AnisotropicStructure& s, const ScalarField& b, const Point& x0, double r,
                             const QuadratureOptions& opt = {})
{
    if (b.constant_value()) return *b.constant_value();
    return integrate_ellipsoid(s, b, x0, r, opt) / s.ellipsoid_volume(r);
}

/// Oscillation data of b about x0: means over every grid ellipsoid and
/// L_p oscillations about arbitrary constants.
class CampanatoSample {
public:
    CampanatoSample(const AnisotropicStructure& s, const ScalarField& b, double p, const Point& x0,
                    std::vector<double> radii, const SpaceOptions& opt = {})
        : p_(p), radii_(std::move(radii))
    {
        if (!(p >= 1.0) || !std::isfinite(p)) throw invalid_input("campanato: p must be in [1, inf)");
        volumes_.reserve(radii_.size());
        for (double r : radii_) volumes_.push_back(s.ellipsoid_volume(r));
        if (b.constant_value()) {
            constant_ = true;
            means_.assign(radii_.size(), *b.constant_value());
            return;
        }
        sample_ = sample_polar(s, b, x0, radii_, opt);
        const std::vector<double> integrals = sample_.profile([](double v) { return v; });
        means_.resize(radii_.size());
        for (std::size_t k = 0; k < radii_.size(); ++k) means_[k] = integrals[k] / volumes_[k];
    }

    [[nodiscard]] const std::vector<double>& radii() const noexcept { return radii_; }
    [[nodiscard]] double mean(std::size_t k) const { return means_.at(k); }
    [[nodiscard]] double volume(std::size_t k) const { return volumes_.at(k); }

    /// ∫_{E(x0, r_k)} |b - c|^p dy.
    [[nodiscard]] double oscillation(std::size_t k, double c) const
    {
        if (constant_) return std::pow(std::abs(means_[k] - c), p_) * volumes_[k];
        const double p = p_;
        if (p == 2.0) return sample_.cumulative(k, [c](double v) { return (v - c) * (v - c); });
        return sample_.cumulative(k, [c, p](double v) { return std::pow(std::abs(v - c), p); });
    }

    /// (|E_k|^{-(1+λp)} ∫_{E_k} |b - b_{E_k}|^p)^{1/p}.
    [[nodiscard]] double campanato_value(std::size_t k, double lambda) const
    {
        return std::pow(std::pow(volumes_[k], -(1.0 + lambda * p_)) * oscillation(k, means_[k]), 1.0 / p_);
    }

private:
    double p_;
    std::vector<double> radii_;
    std::vector<double> volumes_;
    std::vector<double> means_;
    PolarSample sample_;
    bool constant_ = false;
};

inline void check_campanato_lambda(const AnisotropicStructure& s, double lambda)
{
    if (!(lambda >= 0.0) || !(lambda < 1.0 / s.gamma())) {
        throw invalid_input("campanato: lambda must lie in [0, 1/gamma)");
    }
}

/// ‖b‖_{LC^{x0}_{p,λ}}: grid maximum of (|E|^{-(1+λp)} ∫_E |b - b_E|^p)^{1/p}.
inline double campanato_norm(const AnisotropicStructure& s, const ScalarField& b, double p, double lambda,
                             const Point& x0, const RadiusGrid& grid, const SpaceOptions& opt = {})
{
    check_campanato_lambda(s, lambda);
    const CampanatoSample sample(s, b, p, x0, grid.points(), opt);
    double best = 0.0;
    for (std::size_t k = 0; k < sample.radii().size(); ++k) best = std::max(best, sample.campanato_value(k, lambda));
    return best;
}

} // namespace parabolic

#endif // PARABOLIC_SPACES_HPP
