#include "catch_amalgamated.hpp"

#include <cmath>
#include <random>

#include "parabolic/conditions.hpp"

using namespace parabolic;
using Catch::Approx;

namespace {

// ∫₀^∞ (1+u)^m e^{a u} du written out for m = 0, 1, 2 (b = -a > 0).
double k_closed(int m, double a)
{
    const double b = -a;
    if (m == 0) return 1.0 / b;
    if (m == 1) return 1.0 / b + 1.0 / (b * b);
    return 1.0 / b + 2.0 / (b * b) + 2.0 / (b * b * b);
}

ConditionParams fractional_m2()
{
    return ConditionParams::make(Variant::theorem2_small_s, 3.0, 2.0, {6.0, 6.0}, {0.0, 0.0}, 1.0);
}

} // namespace

TEST_CASE("essinf and esssup on grids")
{
    CHECK(essinf_grid({2, 3, 5}) == 2.0);
    CHECK(esssup_grid({0.5, 1.0 / 3.0, 0.2}) == 0.5);
    CHECK(essinf_grid({4, 4, 4}) == 4.0);
    CHECK(esssup_grid({4, 4, 4}) == 4.0);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(1 + trial % 17);
        for (double& x : v) x = std::exp(u(rng));
        std::vector<double> inv(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) inv[i] = 1.0 / v[i];
        CHECK(essinf_grid(v) == Approx(1.0 / esssup_grid(inv)).epsilon(1e-15));
        CHECK(esssup_grid(v) == Approx(1.0 / essinf_grid(inv)).epsilon(1e-15));
    }
    CHECK_THROWS_AS(essinf_grid({}), invalid_input);
    CHECK_THROWS_AS(essinf_grid({1.0, -1.0}), invalid_input);
}

TEST_CASE("tail essinf for power and custom weights")
{
    std::vector<double> tau;
    for (int j = -40; j <= 40; ++j) tau.push_back(std::pow(10.0, j / 10.0));
    // φ₁ τ^{γ/p} = τ^{λ/p} is increasing, so the infimum is at the left end.
    const RadialWeight w = RadialWeight::power(1.5, 2.0, 3.0);
    for (double t : {0.01, 0.3, 7.0}) CHECK(tail_essinf(w, 2.0, 3.0, t, tau) == Approx(std::pow(t, 0.75)));
    CHECK(tail_essinf(RadialWeight::power(0.0, 2.0, 3.0), 2.0, 3.0, 0.2, tau) == Approx(1.0));
    const RadialWeight c = RadialWeight::custom("scaled", [](double r) { return 4.0 * std::pow(r, -1.5); });
    CHECK(tail_essinf(c, 2.0, 3.0, 0.5, tau) == Approx(4.0));
    // A decreasing product: the infimum is taken at the last grid point.
    const RadialWeight d = RadialWeight::custom("falling", [](double r) { return std::pow(r, -2.0); });
    CHECK(tail_essinf(d, 2.0, 3.0, 1.0, tau) == Approx(std::pow(1e4, -0.5)));
}

TEST_CASE("derived exponents")
{
    const ConditionParams c = fractional_m2();
    CHECK(c.q == Approx(1.2));
    CHECK(c.q1 == Approx(2.0));
    CHECK(c.target_exponent() == Approx(2.0));
    CHECK(c.denominator_exponent() == Approx(3.0 * (0.5 - 1.0 / 3.0)));
    const ConditionParams one = ConditionParams::make(Variant::theorem1_small_s, 3.0, 2.0, {4.0}, {0.1});
    CHECK(one.denominator_exponent() == Approx(3.0 * (0.5 - 0.1)));
    const ConditionParams large = ConditionParams::make(Variant::theorem1_large_s, 3.0, 2.0, {4.0}, {0.1}, 0.0, 4.0);
    CHECK(large.denominator_exponent() == Approx(3.0 * (0.5 - 0.25 - 0.1)));
    CHECK(large.rhs_extra_exponent() == Approx(0.75));
    CHECK(to_string(variant_from_string("theorem2_large_s")) == std::string("theorem2_large_s"));
    CHECK_THROWS_AS(variant_from_string("theorem3"), invalid_input);
}

TEST_CASE("parameter validation")
{
    CHECK_THROWS_AS(ConditionParams::make(Variant::theorem1_small_s, 3.0, 2.0, {4.0}, {0.4}), invalid_input);
    CHECK_THROWS_AS(ConditionParams::make(Variant::theorem1_small_s, 3.0, 2.0, {4.0}, {-0.1}), invalid_input);
    CHECK_THROWS_AS(ConditionParams::make(Variant::theorem1_small_s, 3.0, 2.0, {4.0, 4.0}, {0.0}), invalid_input);
    CHECK_THROWS_AS(ConditionParams::make(Variant::theorem2_small_s, 3.0, 2.0, {6.0}, {0.0}, 0.0), invalid_input);
    CHECK_THROWS_AS(ConditionParams::make(Variant::theorem2_small_s, 3.0, 2.0, {6.0}, {0.0}, 3.0), invalid_input);
    CHECK_THROWS_AS(ConditionParams::make(Variant::theorem1_large_s, 3.0, 2.0, {4.0}, {0.0}, 0.0, 1.0), invalid_input);
    ConditionParams c = fractional_m2();
    c.q = 1.5;
    CHECK_THROWS_AS(c.validate(), invalid_input);
}

TEST_CASE("numeric condition integral matches the closed form")
{
    std::vector<double> r_grid;
    for (int j = -8; j <= 8; ++j) r_grid.push_back(std::pow(10.0, j / 4.0));
    struct Case {
        ConditionParams c;
        double lambda;
    };
    const std::vector<Case> cases = {
        {fractional_m2(), 0.0},
        {ConditionParams::make(Variant::theorem1_small_s, 3.0, 2.0, {4.0}, {0.0}), 0.0},
        {ConditionParams::make(Variant::theorem1_small_s, 3.0, 2.0, {4.0}, {0.1}, 0.0, kInf, 1.0), 1.0},
        {ConditionParams::make(Variant::theorem2_large_s, 3.0, 2.0, {6.0}, {0.0}, 0.5, 4.0), 0.0},
    };
    for (const Case& k : cases) {
        ConditionParams c = k.c;
        c.morrey_lambda = k.lambda;
        const double a = k.lambda / c.p - c.denominator_exponent();
        REQUIRE(a < 0.0);
        const RadialWeight phi1 = RadialWeight::power(k.lambda, c.p, c.gamma);
        const RadialWeight phi2 = RadialWeight::monomial(1.0, a - c.rhs_extra_exponent());
        const ConditionReport rep = check_condition(c, phi1, phi2, r_grid, 1e4);
        CHECK_FALSE(rep.divergent);
        for (std::size_t i = 0; i < r_grid.size(); ++i) {
            CHECK(rep.integral[i] == Approx(std::pow(r_grid[i], a) * k_closed(c.m, a)).epsilon(1e-6));
        }
        CHECK(rep.sup_ratio == Approx(k_closed(c.m, a)).epsilon(1e-6));
    }
}

TEST_CASE("power pairs pass and are stable under t_max doubling")
{
    const ConditionParams c = fractional_m2();
    const auto [phi1, phi2] = power_pair(c);
    const std::vector<double> r_grid = RadiusGrid{1e-2, 1e2, 4}.points();
    const ConditionReport a = check_condition(c, phi1, phi2, r_grid, 1e3);
    const ConditionReport b = check_condition(c, phi1, phi2, r_grid, 2e3);
    CHECK_FALSE(a.divergent);
    CHECK(a.sup_ratio <= 1.0);
    CHECK(a.sup_ratio > 0.99);
    CHECK(b.sup_ratio == Approx(a.sup_ratio).epsilon(0.01));
    CHECK(log_power_constant(2, -0.5) == Approx(26.0));
    CHECK(log_power_constant(1, -1.5) == Approx(10.0 / 9.0));
}

TEST_CASE("boundary exponent is divergent")
{
    // λ/p = γ(1/q₁ - Σ1/p_i) makes a = 0.
    ConditionParams c = fractional_m2();
    c.morrey_lambda = c.p * c.denominator_exponent();
    CHECK_THROWS_AS(power_pair(c), invalid_input);
    const RadialWeight phi1 = RadialWeight::power(c.morrey_lambda, c.p, c.gamma);
    const ConditionReport rep = check_condition(c, phi1, RadialWeight::monomial(1.0, 0.0), {0.1, 1.0, 10.0}, 1e3);
    CHECK(rep.divergent);
    CHECK(std::isinf(rep.sup_ratio));
}

TEST_CASE("custom weights")
{
    const ConditionParams c = fractional_m2();
    const auto [phi1, phi2] = power_pair(c);
    const std::vector<double> r_grid = {0.05, 1.0, 20.0};
    const double power_ratio = check_condition(c, phi1, phi2, r_grid, 1e3).sup_ratio;
    const RadialWeight same = RadialWeight::custom("same", [](double r) { return std::pow(r, -1.5); });
    const ConditionReport rep = check_condition(c, same, phi2, r_grid, 1e3);
    CHECK_FALSE(rep.divergent);
    CHECK(rep.sup_ratio == Approx(power_ratio).epsilon(1e-6));
    // φ₁ ≡ 1: the integrand behaves like t^{γ/p - e - 1} = t^{0.5}, which diverges.
    const RadialWeight flat = RadialWeight::custom("flat", [](double) { return 1.0; });
    CHECK(check_condition(c, flat, phi2, r_grid, 1e3).divergent);
}

TEST_CASE("scaling of phi2 and of the radius")
{
    const ConditionParams c = fractional_m2();
    const auto [phi1, phi2] = power_pair(c);
    const std::vector<double> r_grid = {0.1, 1.0, 10.0};
    const double base = check_condition(c, phi1, phi2, r_grid, 1e3).sup_ratio;
    for (double k : {0.5, 3.0}) {
        const RadialWeight scaled2 = RadialWeight::monomial(k * phi2.coefficient(), phi2.exponent());
        CHECK(check_condition(c, phi1, scaled2, r_grid, 1e3).sup_ratio == Approx(base / k).epsilon(1e-10));
    }
    // φ₂ = r^{a+δ}: the ratio at c·r is c^{-δ} times the ratio at r.
    const double delta = 0.2;
    const RadialWeight tilted = RadialWeight::monomial(1.0, phi2.exponent() + delta);
    const ConditionReport at = check_condition(c, phi1, tilted, {1.0}, 1e4);
    for (double scale : {0.1, 10.0}) {
        const ConditionReport moved = check_condition(c, phi1, tilted, {scale}, 1e4);
        CHECK(moved.sup_ratio == Approx(std::pow(scale, -delta) * at.sup_ratio).epsilon(1e-6));
    }
}
