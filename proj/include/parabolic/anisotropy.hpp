#ifndef PARABOLIC_ANISOTROPY_HPP
#define PARABOLIC_ANISOTROPY_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "sphere.hpp"

namespace parabolic {

/// Ellipsoid E(center, radius) = {y : ρ(center - y) < radius}.
struct Ellipsoid {
    Point center;
    double radius = 0.0;
};

/// Polar coordinates of a point: x = A_ρ w(angles).
struct PolarCoordinates {
    double rho = 0.0;
    std::vector<double> angles;
};

/// Diagonal dilation group A_t = diag(t^{α_1}, ..., t^{α_n}) and the
/// quasi-metric ρ defined as the root of F(x, ρ) = Σ x_i² / ρ^{2α_i} = 1.
///
/// The unit ρ-sphere coincides with the Euclidean unit sphere, so E(0, 1)
/// is the Euclidean unit ball and E(0, r) is the axis-aligned ellipsoid with
/// semi-axes r^{α_i}.
class AnisotropicStructure {
public:
    explicit AnisotropicStructure(std::vector<double> exponents, double k = 1.0)
        : alpha_(std::move(exponents)), k_(k)
    {
        if (alpha_.size() < 2) throw invalid_input("structure needs at least 2 exponents");
        if (alpha_.size() > kMaxDim) {
            throw invalid_input("structure dimension exceeds " + std::to_string(kMaxDim));
        }
        for (double a : alpha_) {
            if (!std::isfinite(a) || a < 1.0) {
                throw invalid_input("exponents must be finite and >= 1 (got " + std::to_string(a) +
                                    ")");
            }
        }
        if (!std::isfinite(k_) || k_ < 1.0) throw invalid_input("quasi-triangle constant k must be >= 1");

        gamma_ = 0.0;
        for (double a : alpha_) gamma_ += a;
        alpha_min_ = *std::min_element(alpha_.begin(), alpha_.end());
        alpha_max_ = *std::max_element(alpha_.begin(), alpha_.end());

        int_alpha_.assign(alpha_.size(), 0);
        for (std::size_t i = 0; i < alpha_.size(); ++i) {
            const double r = std::round(alpha_[i]);
            if (r == alpha_[i] && r <= 4.0) int_alpha_[i] = static_cast<int>(r);
        }

        if (alpha_min_ == alpha_max_) {
            kind_ = Kind::isotropic;
        } else if (std::all_of(alpha_.begin(), alpha_.end(), [&](double a) {
                       return a == alpha_min_ || a == 2.0 * alpha_min_;
                   })) {
            kind_ = Kind::two_level;
        }
        unit_measure_ = compute_unit_measure();
    }

    [[nodiscard]] std::size_t dim() const noexcept { return alpha_.size(); }
    [[nodiscard]] const std::vector<double>& exponents() const noexcept { return alpha_; }
    [[nodiscard]] double exponent(std::size_t i) const noexcept { return alpha_[i]; }
    [[nodiscard]] double gamma() const noexcept { return gamma_; }
    [[nodiscard]] double quasi_triangle_k() const noexcept { return k_; }
    [[nodiscard]] double alpha_min() const noexcept { return alpha_min_; }
    [[nodiscard]] double alpha_max() const noexcept { return alpha_max_; }

    /// t^{α_i}, using multiplication for small integer exponents.
    [[nodiscard]] double power(double t, std::size_t i) const noexcept
    {
        switch (int_alpha_[i]) {
        case 1: return t;
        case 2: return t * t;
        case 3: return t * t * t;
        case 4: return (t * t) * (t * t);
        default: return std::pow(t, alpha_[i]);
        }
    }

    /// F(x, ρ) = Σ x_i² / ρ^{2α_i}; strictly decreasing in ρ > 0 for x ≠ 0.
    [[nodiscard]] double F(const Point& x, double rho) const
    {
        check_dim(x);
        double s = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            const double q = x[i] / power(rho, i);
            s += q * q;
        }
        return s;
    }

    [[nodiscard]] double rho(const Point& x) const
    {
        check_dim(x);
        if (!x.finite()) throw invalid_input("rho: non-finite coordinates");
        return rho_unchecked(x);
    }

    /// ρ(x) without validation; x must be finite with matching dimension.
    [[nodiscard]] double rho_unchecked(const Point& x) const noexcept
    {
        switch (kind_) {
        case Kind::isotropic: {
            const double e = euclidean_norm(x);
            return alpha_min_ == 1.0 ? e : std::pow(e, 1.0 / alpha_min_);
        }
        case Kind::two_level: {
            // u = ρ^{2a} solves u² - A u - B = 0.
            double a_sum = 0.0;
            double b_sum = 0.0;
            for (std::size_t i = 0; i < dim(); ++i) {
                const double q = x[i] * x[i];
                if (alpha_[i] == alpha_min_) a_sum += q; else b_sum += q;
            }
            if (a_sum == 0.0 && b_sum == 0.0) return 0.0;
            const double u = 0.5 * (a_sum + std::sqrt(a_sum * a_sum + 4.0 * b_sum));
            if (alpha_min_ == 1.0) return std::sqrt(u);
            return std::pow(u, 0.5 / alpha_min_);
        }
        case Kind::general: break;
        }
        return rho_general(x);
    }

    [[nodiscard]] Point dilate(double t, const Point& x) const
    {
        if (!(t > 0.0) || !std::isfinite(t)) throw invalid_input("dilate: t must be positive and finite");
        check_dim(x);
        return dilate_unchecked(t, x);
    }

    [[nodiscard]] Point dilate_unchecked(double t, const Point& x) const noexcept
    {
        Point y(x.size());
        for (std::size_t i = 0; i < dim(); ++i) y[i] = power(t, i) * x[i];
        return y;
    }

    /// w = A_{1/ρ(x)} x, the point of the unit sphere on the orbit of x.
    [[nodiscard]] Point project_to_sphere(const Point& x) const
    {
        const double r = rho(x);
        if (r == 0.0) throw invalid_input("project_to_sphere: x must be nonzero");
        return dilate_unchecked(1.0 / r, x);
    }

    /// J(w) = Σ α_i w_i², the angular part of the polar Jacobian.
    [[nodiscard]] double jacobian(const Point& w) const
    {
        check_dim(w);
        if (std::abs(squared_norm(w) - 1.0) > 1e-8) {
            throw invalid_input("jacobian: point is not on the unit sphere");
        }
        return jacobian_unchecked(w);
    }

    [[nodiscard]] double jacobian_unchecked(const Point& w) const noexcept
    {
        double s = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) s += alpha_[i] * w[i] * w[i];
        return s;
    }

    /// υ_ρ = |E(0, 1)| = (1/γ) ∫ J dσ, by angular quadrature for n <= 3.
    [[nodiscard]] double unit_measure() const noexcept { return unit_measure_; }

    [[nodiscard]] double ellipsoid_volume(double r) const
    {
        if (!(r > 0.0) || !std::isfinite(r)) throw invalid_input("ellipsoid_volume: r must be positive");
        return unit_measure_ * std::pow(r, gamma_);
    }

    [[nodiscard]] bool contains(const Ellipsoid& e, const Point& y) const
    {
        return rho(e.center - y) < e.radius;
    }

    /// Spherical parametrization with latitude angles: φ_i ∈ [-π/2, π/2] for
    /// i <= n-2 and φ_{n-1} ∈ [0, 2π).
    ///   w_n = sin φ_1, w_{n-1} = cos φ_1 sin φ_2, ...,
    ///   w_2 = cos φ_1 ... cos φ_{n-2} sin φ_{n-1}, w_1 = cos φ_1 ... cos φ_{n-1}.
    [[nodiscard]] Point polar_to_point(double rho, std::span<const double> angles) const
    {
        const std::size_t n = dim();
        if (!(rho > 0.0) || !std::isfinite(rho)) throw invalid_input("polar_to_point: rho must be positive");
        if (angles.size() != n - 1) {
            throw invalid_input("polar_to_point: expected " + std::to_string(n - 1) + " angles");
        }
        for (std::size_t i = 0; i + 1 < n - 1; ++i) {
            if (!(angles[i] >= -0.5 * kPi && angles[i] <= 0.5 * kPi)) {
                throw invalid_input("polar_to_point: latitude angle out of [-pi/2, pi/2]");
            }
        }
        const double last = angles[n - 2];
        if (!(last >= 0.0 && last < 2.0 * kPi)) {
            throw invalid_input("polar_to_point: azimuth out of [0, 2pi)");
        }
        Point w(n);
        double c = 1.0;
        for (std::size_t k = 0; k + 1 < n - 1; ++k) {
            w[n - 1 - k] = c * std::sin(angles[k]);
            c *= std::cos(angles[k]);
        }
        w[1] = c * std::sin(last);
        w[0] = c * std::cos(last);
        return dilate_unchecked(rho, w);
    }

    [[nodiscard]] PolarCoordinates point_to_polar(const Point& x) const
    {
        const std::size_t n = dim();
        const double r = rho(x);
        if (r == 0.0) throw invalid_input("point_to_polar: x must be nonzero");
        const Point w = dilate_unchecked(1.0 / r, x);
        PolarCoordinates out;
        out.rho = r;
        out.angles.assign(n - 1, 0.0);
        double c = 1.0;
        for (std::size_t k = 0; k + 1 < n - 1; ++k) {
            const double s = c > 0.0 ? std::clamp(w[n - 1 - k] / c, -1.0, 1.0) : 0.0;
            out.angles[k] = std::asin(s);
            c *= std::cos(out.angles[k]);
        }
        double phi = std::atan2(w[1], w[0]);
        if (phi < 0.0) phi += 2.0 * kPi;
        if (phi >= 2.0 * kPi) phi = 0.0;
        out.angles[n - 2] = phi;
        return out;
    }

    void check_dim(const Point& x) const
    {
        if (x.size() != dim()) {
            throw invalid_input("point dimension " + std::to_string(x.size()) +
                                " does not match structure dimension " + std::to_string(dim()));
        }
    }

private:
    enum class Kind { isotropic, two_level, general };

    [[nodiscard]] double rho_general(const Point& x) const noexcept
    {
        double m = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            if (x[i] != 0.0) m = std::max(m, std::pow(std::abs(x[i]), 1.0 / alpha_[i]));
        }
        if (m == 0.0) return 0.0;
        // F(x, m) >= 1 and F(x, n^{1/(2α_min)} m) <= 1.
        double lo = std::log(m);
        double hi = lo + std::log(static_cast<double>(dim())) / (2.0 * alpha_min_);
        auto log_f = [&](double s) {
            double sum = 0.0;
            for (std::size_t i = 0; i < dim(); ++i) {
                if (x[i] != 0.0) {
                    sum += std::exp(2.0 * (std::log(std::abs(x[i])) - alpha_[i] * s));
                }
            }
            return std::log(sum);
        };
        while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            if (log_f(mid) > 0.0) lo = mid; else hi = mid;
        }
        double s = 0.5 * (lo + hi);
        for (int iter = 0; iter < 50; ++iter) {
            double sum = 0.0;
            double dsum = 0.0;
            for (std::size_t i = 0; i < dim(); ++i) {
                if (x[i] == 0.0) continue;
                const double term = std::exp(2.0 * (std::log(std::abs(x[i])) - alpha_[i] * s));
                sum += term;
                dsum -= 2.0 * alpha_[i] * term;
            }
            const double step = std::log(sum) / (dsum / sum);
            s -= step;
            if (std::abs(step) < 1e-14) break;
        }
        return std::exp(s);
    }

    [[nodiscard]] double compute_unit_measure() const
    {
        if (dim() > 3) {
            // E(0, 1) is the Euclidean unit ball.
            const double n = static_cast<double>(dim());
            return std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
        }
        const SphereRule rule = make_sphere_rule(dim(), default_azimuth_nodes(dim()));
        double s = 0.0;
        for (std::size_t j = 0; j < rule.size(); ++j) {
            s += rule.weights[j] * jacobian_unchecked(rule.nodes[j]);
        }
        return s / gamma_;
    }

    std::vector<double> alpha_;
    std::vector<int> int_alpha_;
    double k_ = 1.0;
    double gamma_ = 0.0;
    double alpha_min_ = 1.0;
    double alpha_max_ = 1.0;
    Kind kind_ = Kind::general;
    double unit_measure_ = 0.0;
};

/// Alternative standard-parabolic gauge √((|x'|² + √(|x'|⁴ + x_n²)) / 2).
/// It is a different function from the F-root ρ for exponents (1, ..., 1, 2).
inline double parabolic_gauge(const Point& x)
{
    if (x.size() < 2) throw invalid_input("parabolic_gauge needs n >= 2");
    if (!x.finite()) throw invalid_input("parabolic_gauge: non-finite coordinates");
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) s += x[i] * x[i];
    const double xn = x[x.size() - 1];
    return std::sqrt(0.5 * (s + std::sqrt(s * s + xn * xn)));
}

} // namespace parabolic

#endif // PARABOLIC_ANISOTROPY_HPP
