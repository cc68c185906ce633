#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "parabolic/kernel.hpp"

using namespace parabolic;
using Catch::Approx;

TEST_CASE("builtin kernel values")
{
    const AnisotropicStructure par({1, 2});
    const AnisotropicStructure iso({1, 1});
    const RoughKernel one = builtin_kernel(par, {"constant_one"});
    CHECK(one.evaluate(par, Point{0.3, -7.0}) == 1.0);
    const RoughKernel odd = builtin_kernel(iso, {"odd_coordinate", 1});
    CHECK(odd.evaluate(iso, Point{3, 4}) == Approx(0.6));
    const RoughKernel harm = builtin_kernel(par, {"angular_harmonic", 1, 2});
    CHECK(harm.on_sphere(Point{1, 0}) == Approx(1.0));
    CHECK(harm.on_sphere(Point{0, 1}) == Approx(-1.0));
}

TEST_CASE("sphere norms")
{
    const AnisotropicStructure par({1, 2});
    CHECK(sphere_norm(builtin_kernel(par, {"constant_one"}), par, 2.0) == Approx(std::sqrt(2.0 * kPi)).epsilon(1e-8));
    CHECK(sphere_norm(builtin_kernel(par, {"sign_coordinate", 1}), par, 1.0) == Approx(2.0 * kPi).epsilon(1e-6));
    CHECK(sphere_norm(builtin_kernel(par, {"angular_harmonic", 1, 1}), par, 2.0) == Approx(std::sqrt(kPi)).epsilon(1e-8));
    CHECK(sphere_norm(builtin_kernel(par, {"odd_coordinate", 2}), par, kInf) == Approx(1.0).epsilon(1e-4));

    // S² in R³: ‖1‖_{L_2} = √(4π), ‖w_3‖_{L_2}² = 4π/3.
    const AnisotropicStructure s3({1, 1, 2});
    CHECK(sphere_norm(builtin_kernel(s3, {"constant_one"}), s3, 2.0) == Approx(std::sqrt(4.0 * kPi)).epsilon(1e-6));
    CHECK(sphere_norm(builtin_kernel(s3, {"odd_coordinate", 3}), s3, 2.0) ==
          Approx(std::sqrt(4.0 * kPi / 3.0)).epsilon(1e-6));
}

TEST_CASE("kernels are homogeneous of degree zero")
{
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::uniform_real_distribution<double> lt(-3.0, 3.0);
    const AnisotropicStructure s({1, 2});
    const RoughKernel k = builtin_kernel(s, {"odd_coordinate", 1});
    const RoughKernel h = builtin_kernel(s, {"angular_harmonic", 1, 3});
    for (int i = 0; i < 300; ++i) {
        const Point x{u(rng), u(rng)};
        const double t = std::pow(10.0, lt(rng));
        CHECK(k.evaluate(s, s.dilate(t, x)) == Approx(k.evaluate(s, x)).epsilon(1e-10).margin(1e-12));
        CHECK(h.evaluate(s, s.dilate(t, x)) == Approx(h.evaluate(s, x)).epsilon(1e-10).margin(1e-12));
    }
}

TEST_CASE("mean-zero detection")
{
    const AnisotropicStructure par({1, 2});
    const RoughKernel odd = builtin_kernel(par, {"odd_coordinate", 1});
    CHECK(odd.mean_zero());
    CHECK(std::abs(odd.moments(par).first) < 1e-10);
    CHECK(builtin_kernel(par, {"sign_coordinate", 2}).mean_zero());
    const RoughKernel one = builtin_kernel(par, {"constant_one"});
    CHECK_FALSE(one.mean_zero());
    // ∫ J dσ = γ υ = 3π.
    CHECK(one.moments(par).first == Approx(3.0 * kPi).epsilon(1e-8));
    // cos 2θ is not mean-zero against J = 1 + sin²θ on the (1, 2) sphere.
    CHECK_FALSE(builtin_kernel(par, {"angular_harmonic", 1, 2}).mean_zero());
    CHECK(builtin_kernel(par, {"angular_harmonic", 1, 1}).mean_zero());
}

TEST_CASE("false mean-zero claims and bad parameters are rejected")
{
    const AnisotropicStructure par({1, 2});
    CHECK_THROWS_AS(RoughKernel(par, "shifted", [](const Point& w) { return w[0] + 0.1; }, kInf, true), invalid_input);
    CHECK_NOTHROW(RoughKernel(par, "odd", [](const Point& w) { return w[1] * w[1] * w[0]; }, kInf, true));
    CHECK_THROWS_AS(RoughKernel(par, "low_s", [](const Point&) { return 1.0; }, 1.0), invalid_input);
    CHECK_THROWS_AS(builtin_kernel(par, {"odd_coordinate", 3}), invalid_input);
    CHECK_THROWS_AS(builtin_kernel(par, {"no_such_kernel"}), invalid_input);
    CHECK_THROWS_AS(builtin_kernel(AnisotropicStructure({1, 1, 1}), {"angular_harmonic", 1, 2}), invalid_input);
}
