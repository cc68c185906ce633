#ifndef PARABOLIC_KERNEL_HPP
#define PARABOLIC_KERNEL_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "anisotropy.hpp"
#include "core.hpp"
#include "sphere.hpp"

namespace parabolic {

/// Rough kernel Ω: a function on the unit sphere extended to ℝⁿ \ {0} by
/// Ω(x) = Ω(A_{1/ρ(x)} x), hence A_t-homogeneous of degree zero.
class RoughKernel {
public:
    using SphereFunction = std::function<double(const Point&)>;

    /// `claim_mean_zero` is checked against |∫ Ω J dσ| <= 1e-8 ‖Ω‖_{L¹(dσ)};
    /// a false claim is rejected with invalid_input.
    RoughKernel(const AnisotropicStructure& structure, std::string name, SphereFunction fn,
                double integrability_s = kInf, bool claim_mean_zero = false)
        : name_(std::move(name)), fn_(std::move(fn)), s_(integrability_s)
    {
        if (!fn_) throw invalid_input("kernel '" + name_ + "' has no sphere function");
        if (!(s_ > 1.0)) throw invalid_input("kernel integrability index s must exceed 1");
        dim_ = structure.dim();
        const auto [moment, l1] = moments(structure);
        mean_zero_ = std::abs(moment) <= 1e-8 * l1;
        if (claim_mean_zero && !mean_zero_) {
            throw invalid_input("kernel '" + name_ + "' is not mean-zero against J dσ (moment " +
                                std::to_string(moment) + ")");
        }
    }

    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] double integrability_s() const noexcept { return s_; }
    [[nodiscard]] bool mean_zero() const noexcept { return mean_zero_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

    /// Ω(w) for w on the unit sphere.
    [[nodiscard]] double on_sphere(const Point& w) const { return fn_(w); }

    /// Ω(x) for x ≠ 0.
    [[nodiscard]] double evaluate(const AnisotropicStructure& structure, const Point& x) const
    {
        return fn_(structure.project_to_sphere(x));
    }

    /// (∫ Ω J dσ, ∫ |Ω| dσ) with the default angular rule.
    [[nodiscard]] std::pair<double, double> moments(const AnisotropicStructure& structure) const
    {
        const SphereRule rule = make_sphere_rule(structure.dim(), default_azimuth_nodes(structure.dim()));
        double moment = 0.0;
        double l1 = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) {
            const double v = fn_(rule.nodes[j]);
            moment += rule.weights[j] * v * structure.jacobian_unchecked(rule.nodes[j]);
            l1 += rule.weights[j] * std::abs(v);
        }
        return {moment, l1};
    }

private:
    std::string name_;
    SphereFunction fn_;
    double s_ = kInf;
    bool mean_zero_ = false;
    std::size_t dim_ = 0;
};

namespace detail {

inline double sphere_norm_with(const RoughKernel& kernel, const SphereRule& rule, double s)
{
    if (std::isinf(s)) {
        double m = 0.0;
        for (const Point& w : rule.nodes) m = std::max(m, std::abs(kernel.on_sphere(w)));
        return m;
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < rule.size(); ++j) {
        sum += rule.weights[j] * std::pow(std::abs(kernel.on_sphere(rule.nodes[j])), s);
    }
    return std::pow(sum, 1.0 / s);
}

} // namespace detail

/// ‖Ω‖_{L_s(S^{n-1})} with respect to unnormalized surface measure. The value
/// is accepted when two angular resolutions agree (1e-6 relative, 1e-4 for
/// s = ∞ where the node supremum converges only quadratically).
inline double sphere_norm(const RoughKernel& kernel, const AnisotropicStructure& structure, double s)
{
    if (!(s >= 1.0)) throw invalid_input("sphere_norm: s must be >= 1");
    const std::size_t n = structure.dim();
    const std::size_t base = default_azimuth_nodes(n);
    const double coarse = detail::sphere_norm_with(kernel, make_sphere_rule(n, 2 * base), s);
    const double fine = detail::sphere_norm_with(kernel, make_sphere_rule(n, 4 * base), s);
    const double tol = std::isinf(s) ? 1e-4 : 1e-6;
    if (relative_difference(coarse, fine, 1e-300) > tol) {
        throw accuracy_error("sphere_norm did not converge", coarse, fine);
    }
    return fine;
}

/// Name and parameters of a builtin kernel.
struct KernelSpec {
    std::string name = "constant_one";
    int index = 1;      // odd_coordinate / sign_coordinate, 1-based
    int frequency = 1;  // angular_harmonic
};

/// constant_one, odd_coordinate(i), sign_coordinate(i), angular_harmonic(freq).
/// The mean-zero flag is established by quadrature, not declared.
inline RoughKernel builtin_kernel(const AnisotropicStructure& structure, const KernelSpec& spec)
{
    const std::size_t n = structure.dim();
    auto check_index = [&](int i) {
        if (i < 1 || static_cast<std::size_t>(i) > n) {
            throw invalid_input("kernel coordinate index " + std::to_string(i) + " out of range 1.." +
                                std::to_string(n));
        }
        return static_cast<std::size_t>(i - 1);
    };
    if (spec.name == "constant_one") {
        return RoughKernel(structure, "constant_one", [](const Point&) { return 1.0; });
    }
    if (spec.name == "odd_coordinate") {
        const std::size_t i = check_index(spec.index);
        return RoughKernel(structure, "odd_coordinate(" + std::to_string(spec.index) + ")",
                           [i](const Point& w) { return w[i]; }, kInf, true);
    }
    if (spec.name == "sign_coordinate") {
        const std::size_t i = check_index(spec.index);
        return RoughKernel(structure, "sign_coordinate(" + std::to_string(spec.index) + ")",
                           [i](const Point& w) { return w[i] > 0.0 ? 1.0 : (w[i] < 0.0 ? -1.0 : 0.0); },
                           kInf, true);
    }
    if (spec.name == "angular_harmonic") {
        if (n != 2) throw invalid_input("angular_harmonic is defined for n = 2 only");
        const double k = spec.frequency;
        return RoughKernel(structure, "angular_harmonic(" + std::to_string(spec.frequency) + ")",
                           [k](const Point& w) { return std::cos(k * std::atan2(w[1], w[0])); });
    }
    throw invalid_input("unknown kernel '" + spec.name + "'");
}

} // namespace parabolic

#endif // PARABOLIC_KERNEL_HPP
