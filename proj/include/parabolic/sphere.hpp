#ifndef PARABOLIC_SPHERE_HPP
#define PARABOLIC_SPHERE_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <utility>
#include <string>
#include <vector>

#include "core.hpp"
#include "gauss.hpp"

namespace parabolic {

/// Quadrature rule for the unnormalized surface measure dσ on the Euclidean
/// unit sphere S^{n-1}, which is also the unit ρ-sphere {w : ρ(w) = 1}.
///
/// n = 2: midpoint rule in θ (periodic, spectrally accurate for smooth data).
/// n = 3: Gauss-Legendre in latitude φ₁ ∈ [-π/2, π/2] times midpoint in
///        azimuth φ₂, using w = (cos φ₁ cos φ₂, cos φ₁ sin φ₂, sin φ₁).
struct SphereRule {
    std::size_t dim = 0;
    std::vector<Point> nodes;
    std::vector<double> weights;
    // Azimuthal spacing. For n = 2, node j sits at θ = (j + 1/2)·cell_width.
    double cell_width = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

/// Point on S^1 at angle θ.
inline Point circle_point(double theta) { return Point{std::cos(theta), std::sin(theta)}; }

/// `azimuth_nodes` is the node count in θ (n = 2) or in φ₂ (n = 3, with
/// azimuth_nodes / 2 latitude nodes).
inline SphereRule make_sphere_rule(std::size_t dim, std::size_t azimuth_nodes)
{
    if (azimuth_nodes < 4) throw invalid_input("sphere rule needs at least 4 azimuth nodes");
    SphereRule rule;
    rule.dim = dim;
    if (dim == 2) {
        const double h = 2.0 * kPi / static_cast<double>(azimuth_nodes);
        rule.cell_width = h;
        rule.nodes.reserve(azimuth_nodes);
        for (std::size_t j = 0; j < azimuth_nodes; ++j) {
            rule.nodes.push_back(circle_point((static_cast<double>(j) + 0.5) * h));
            rule.weights.push_back(h);
        }
        return rule;
    }
    if (dim == 3) {
        const int lat = static_cast<int>(std::max<std::size_t>(2, azimuth_nodes / 2));
        const GaussRule& g = gauss_legendre(lat);
        const double h = 2.0 * kPi / static_cast<double>(azimuth_nodes);
        rule.cell_width = h;
        rule.nodes.reserve(static_cast<std::size_t>(lat) * azimuth_nodes);
        for (int i = 0; i < lat; ++i) {
            const double phi1 = 0.5 * kPi * g.nodes[i];
            const double c1 = std::cos(phi1);
            const double s1 = std::sin(phi1);
            const double wlat = 0.5 * kPi * g.weights[i] * c1;
            for (std::size_t j = 0; j < azimuth_nodes; ++j) {
                const double phi2 = (static_cast<double>(j) + 0.5) * h;
                rule.nodes.push_back(Point{c1 * std::cos(phi2), c1 * std::sin(phi2), s1});
                rule.weights.push_back(wlat * h);
            }
        }
        return rule;
    }
    throw invalid_input("angular quadrature is implemented for n = 2 and n = 3 only (got n = " +
                        std::to_string(dim) + ")");
}

/// Default node counts: 512 on the circle, 128 x 64 on S².
inline std::size_t default_azimuth_nodes(std::size_t dim) { return dim == 2 ? 512 : 128; }

/// Shared immutable rule for (dim, azimuth_nodes); safe to call concurrently.
inline const SphereRule& cached_sphere_rule(std::size_t dim, std::size_t azimuth_nodes)
{
    static std::mutex mutex;
    static std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<SphereRule>> cache;
    const std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{dim, azimuth_nodes}];
    if (!slot) slot = std::make_unique<SphereRule>(make_sphere_rule(dim, azimuth_nodes));
    return *slot;
}

/// Surface area of S^{n-1}.
inline double sphere_area(std::size_t dim)
{
    const double n = static_cast<double>(dim);
    return 2.0 * std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0);
}

} // namespace parabolic

#endif // PARABOLIC_SPHERE_HPP
