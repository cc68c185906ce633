#include "catch_amalgamated.hpp"

#include <cmath>
#include <functional>

#include "parabolic/field.hpp"

using namespace parabolic;
using Catch::Approx;

namespace {

// Composite Simpson on [a, b].
double simpson(const std::function<double(double)>& g, double a, double b, int n = 20000)
{
    const double h = (b - a) / n;
    double s = g(a) + g(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * g(a + i * h);
    return s * h / 3.0;
}

double bump_profile(double q) { return q >= 1.0 ? 0.0 : std::exp(1.0 - 1.0 / (1.0 - q * q)); }

} // namespace

TEST_CASE("builtin field values")
{
    const AnisotropicStructure s({1, 2});
    CHECK(constant_field(2, 5.0)(Point{1.3, -2}) == 5.0);
    CHECK(rho_power(s, Point{0, 0}, 1.0)(Point{0, 4}) == Approx(2.0));
    CHECK(bump(s, Point{0, 0}, 1.0)(Point{1, 0}) == 0.0);
    CHECK(bump(s, Point{0, 0}, 1.0)(Point{0, 0}) == Approx(1.0));
    CHECK(log_rho(s, Point{0, 0})(Point{0, 1}) == Approx(0.0).margin(1e-15));
    CHECK(coordinate_field(2, 2)(Point{3, 7}) == 7.0);
    CHECK(indicator_ellipsoid(s, Point{1, 1}, 1.0)(Point{1.5, 1.2}) == 1.0);
    CHECK(indicator_ellipsoid(s, Point{1, 1}, 1.0)(Point{2.5, 1}) == 0.0);
    CHECK_THROWS_AS(bump(s, Point{0, 0}, 0.0), invalid_input);
    FieldSpec unknown;
    unknown.name = "nope";
    CHECK_THROWS_AS(builtin_field(s, unknown), invalid_input);
}

TEST_CASE("integrals over ellipsoids")
{
    const AnisotropicStructure s({1, 2});
    const Point o{0, 0};
    CHECK(integrate_ellipsoid(s, constant_field(2, 1.0), o, 1.0) == Approx(kPi).epsilon(1e-8));
    CHECK(integrate_ellipsoid(s, rho_power(s, o, 1.0), o, 1.0) == Approx(0.75 * kPi).epsilon(1e-8));
    CHECK(integrate_ellipsoid(s, constant_field(2, 0.0), o, 1.0) == 0.0);
    // ∫ ln ρ over E(0, 1) = 3π ∫₀¹ ρ² ln ρ dρ = -π/3.
    CHECK(integrate_ellipsoid(s, log_rho(s, o), o, 1.0) == Approx(-kPi / 3.0).epsilon(1e-6));
    CHECK(lp_norm_ellipsoid(s, constant_field(2, 1.0), 2.0, o, 1.0) == Approx(std::sqrt(kPi)).epsilon(1e-8));
}

TEST_CASE("radial reduction against a one-dimensional oracle")
{
    for (const std::vector<double>& alpha : {std::vector<double>{1, 2}, {1, 1, 2}}) {
        const AnisotropicStructure s(alpha);
        const Point o = zero_point(alpha.size());
        const double jsum = s.gamma() * s.unit_measure();
        const double g = s.gamma();
        for (double R : {0.5, 1.0, 3.0}) {
            for (double r : {0.3, 1.0, 2.0}) {
                const double oracle =
                    jsum * simpson([&](double t) { return bump_profile(t / R) * std::pow(t, g - 1.0); }, 0.0, std::min(r, R));
                CHECK(integrate_ellipsoid(s, bump(s, o, R), o, r) == Approx(oracle).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("indicator Lp norms follow the volume law")
{
    const AnisotropicStructure s({1, 2});
    const Point o{0, 0};
    for (double R : {0.5, 1.0, 2.0}) {
        const ScalarField f = indicator_ellipsoid(s, o, R);
        for (double r : {0.25, 1.0, 4.0}) {
            for (double p : {1.0, 2.0, 3.5}) {
                const double oracle = std::pow(kPi, 1.0 / p) * std::pow(std::min(r, R), 3.0 / p);
                CHECK(lp_norm_ellipsoid(s, f, p, o, r) == Approx(oracle).epsilon(1e-3));
            }
        }
    }
    // An off-center indicator lying inside the integration ellipsoid. Its edge
    // is not a polar shell around o, so only the indicator tolerance applies.
    QuadratureOptions opt;
    opt.tolerance = 1e-3;
    const ScalarField g = indicator_ellipsoid(s, Point{0.4, 0.5}, 0.5);
    CHECK(integrate_ellipsoid(s, g, o, 3.0, opt) == Approx(kPi * 0.125).epsilon(1e-3));
}

TEST_CASE("norm homogeneity, nesting and translation")
{
    const AnisotropicStructure s({1, 2});
    const Point o{0, 0};
    const ScalarField f = bump(s, Point{0.2, 0.1}, 1.0);
    const double base = lp_norm_ellipsoid(s, f, 2.0, o, 1.0);
    CHECK(lp_norm_ellipsoid(s, scaled(f, -3.0), 2.0, o, 1.0) == Approx(3.0 * base).epsilon(1e-8));
    double prev = 0.0;
    for (double r = 0.1; r < 3.0; r *= 1.5) {
        const double v = lp_norm_ellipsoid(s, f, 2.0, o, r);
        CHECK(v >= prev * (1.0 - 1e-8));
        prev = v;
    }
    const Point z{2.0, -3.0};
    CHECK(integrate_ellipsoid(s, shifted(f, z), z, 0.8) == Approx(integrate_ellipsoid(s, f, o, 0.8)).epsilon(1e-8));
}

TEST_CASE("dilation changes integrals by t^gamma")
{
    const AnisotropicStructure s({1, 2});
    const Point o{0, 0};
    const ScalarField f = bump(s, Point{0.3, 0.2}, 1.0);
    for (double t : {0.1, 2.0, 10.0}) {
        // f ∘ A_{1/t} is the bump of radius t around A_t(0.3, 0.2).
        const ScalarField ft = bump(s, s.dilate(t, Point{0.3, 0.2}), t);
        CHECK(integrate_ellipsoid(s, ft, o, 1.5 * t) ==
              Approx(std::pow(t, 3.0) * integrate_ellipsoid(s, f, o, 1.5)).epsilon(1e-6));
    }
}

TEST_CASE("near and far parts add up")
{
    const AnisotropicStructure s({1, 2});
    const ScalarField f = bump(s, Point{0, 0}, 2.0);
    const Ellipsoid e{Point{0.2, 0.1}, 0.7};
    const ScalarField near = restricted_inside(s, f, e);
    const ScalarField far = restricted_outside(s, f, e);
    for (const Point& y : {Point{0.2, 0.1}, Point{0.5, 0.3}, Point{1.0, 0.0}, Point{-0.4, 2.5}}) {
        CHECK(near(y) + far(y) == Approx(f(y)).epsilon(1e-15));
    }
    CHECK(far(Point{0.2, 0.1}) == 0.0);
    const Point o{0, 0};
    CHECK(integrate_ellipsoid(s, near, o, 2.0) + integrate_ellipsoid(s, far, o, 2.0) ==
          Approx(integrate_ellipsoid(s, f, o, 2.0)).epsilon(1e-4));
}

TEST_CASE("bad arguments")
{
    const AnisotropicStructure s({1, 2});
    const ScalarField f = constant_field(2, 1.0);
    CHECK_THROWS_AS(integrate_ellipsoid(s, f, Point{0, 0}, 0.0), invalid_input);
    CHECK_THROWS_AS(integrate_ellipsoid(s, f, Point{0, 0, 0}, 1.0), invalid_input);
    CHECK_THROWS_AS(lp_norm_ellipsoid(s, f, 0.5, Point{0, 0}, 1.0), invalid_input);
    CHECK_THROWS_AS(integrate_ellipsoid(s, f, Point{NAN, 0}, 1.0), invalid_input);
}
