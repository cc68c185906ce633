// Acceptance suite: one [PASS]/[FAIL] line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "parabolic/cli.hpp"
#include "parabolic/parabolic.hpp"

using namespace parabolic;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            if (!detail.empty()) detail += "; ";
            detail += what;
        }
    }
};

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

bool close(double a, double b, double rel) { return std::abs(a - b) <= rel * std::abs(b); }

const AnisotropicStructure& par()
{
    static const AnisotropicStructure s({1, 2});
    return s;
}

Point random_point(std::mt19937_64& rng, std::size_t n)
{
    std::uniform_real_distribution<double> e(-3.0, 3.0);
    std::uniform_int_distribution<int> sign(0, 1);
    Point x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = (sign(rng) ? 1.0 : -1.0) * std::pow(10.0, e(rng));
    return x;
}

Experiment load(const char* name)
{
    return config::experiment(config::load(std::string(PARABOLIC_CONFIG_DIR) + "/" + name));
}

std::string summary(const VerificationReport& r)
{
    return r.check_name + " C=" + num(r.fitted_constant) + " refined=" + num(r.refined_constant) +
           " growth=" + num(r.growth);
}

Outcome metric_suite()
{
    Outcome o;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> logt(-4.0, 4.0);
    double worst = 0.0;
    for (const std::vector<double>& alpha : {std::vector<double>{1, 2}, {1, 1, 2}, {1, 2, 3}, {1.5, 2.5}}) {
        const AnisotropicStructure s(alpha);
        for (int i = 0; i < 250; ++i) {
            const Point x = random_point(rng, alpha.size());
            const double t = std::exp(logt(rng));
            worst = std::max(worst, std::abs(s.rho(s.dilate(t, x)) / (t * s.rho(x)) - 1.0));
        }
    }
    o.require(worst <= 1e-10, "homogeneity error " + num(worst));

    const AnisotropicStructure iso({1, 1});
    double euclid = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Point x = random_point(rng, 2);
        euclid = std::max(euclid, std::abs(iso.rho(x) / std::hypot(x[0], x[1]) - 1.0));
    }
    o.require(euclid <= 1e-12, "euclidean reduction error " + num(euclid));

    const double golden = std::sqrt((1.0 + std::sqrt(5.0)) / 2.0);
    o.require(close(par().rho(Point{1, 1}), golden, 1e-10), "rho(1,1) = " + num(par().rho(Point{1, 1})));

    int violations = 0;
    for (int i = 0; i < 1000; ++i) {
        const Point x = random_point(rng, 2);
        const Point y = random_point(rng, 2);
        if (par().rho(x + y) > (par().rho(x) + par().rho(y)) * (1.0 + 1e-14)) ++violations;
    }
    o.require(violations == 0, std::to_string(violations) + " triangle violations");
    return o;
}

Outcome geometry_suite()
{
    Outcome o;
    const AnisotropicStructure& s = par();
    // E(0, r) is the ellipse with semi-axes r and r²: area π r³ computed by a midpoint rule.
    for (double r : {0.1, 1.0, 10.0}) {
        const int n = 20000;
        double area = 0.0;
        for (int i = 0; i < n; ++i) {
            const double u = -1.0 + (i + 0.5) * 2.0 / n;
            area += 2.0 * r * r * std::sqrt(1.0 - u * u) * (2.0 * r / n);
        }
        o.require(close(s.ellipsoid_volume(r), area, 1e-3), "volume at r=" + num(r));
    }
    o.require(close(s.unit_measure(), kPi, 1e-6), "unit measure " + num(s.unit_measure()));
    std::mt19937_64 rng(2);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const Point x = random_point(rng, 2);
        const PolarCoordinates pc = s.point_to_polar(x);
        const Point back = s.polar_to_point(pc.rho, pc.angles);
        // Coordinate i lives on the scale ρ^{α_i}.
        for (std::size_t k = 0; k < 2; ++k) {
            worst = std::max(worst, std::abs(back[k] - x[k]) / std::pow(pc.rho, s.exponent(k)));
        }
    }
    o.require(worst <= 1e-10, "polar round trip error " + num(worst));
    return o;
}

Outcome operator_suite()
{
    Outcome o;
    const AnisotropicStructure& s = par();
    const Point origin{0, 0};
    const ScalarField chi = indicator_ellipsoid(s, origin, 1.0);
    const RoughKernel one = builtin_kernel(s, {"constant_one", 1});
    const RoughKernel odd = builtin_kernel(s, {"odd_coordinate", 1});

    const double t11 = fractional_integral(s, OperatorSpec{one, 1.0, {}}, chi, origin);
    o.require(close(t11, 3.0 * kPi, 1e-4), "fractional integral " + num(t11));
    const double m = maximal(s, OperatorSpec{one, 1.0, {}}, chi, origin, default_t_grid(1.0));
    o.require(close(m, std::cbrt(kPi), 1e-3), "maximal " + num(m));
    const double c = commutator(s, OperatorSpec{one, 1.0, {rho_power(s, origin, 1.0)}}, chi, origin);
    o.require(close(c, -1.5 * kPi, 1e-4), "commutator " + num(c));

    const ScalarField f = bump(s, origin, 1.0);
    double constant = 0.0;
    for (double alpha : {0.0, 1.0}) {
        const OperatorSpec spec{odd, alpha, {constant_field(2, 3.0), constant_field(2, -0.5)}};
        for (const Point& x : {Point{0.1, 0.2}, Point{0.5, -0.3}, Point{2.0, 1.0}}) {
            constant = std::max(constant, std::abs(commutator(s, spec, f, x)));
        }
    }
    o.require(constant < 1e-12, "constant-symbol commutator " + num(constant));

    double pv = 0.0;
    for (const Point& x : {Point{0, 0}, Point{0, 0.3}, Point{0, -0.6}}) {
        pv = std::max(pv, std::abs(singular_integral(s, OperatorSpec{odd, 0.0, {}}, f, x)));
    }
    o.require(pv < 1e-8, "odd PV at symmetric points " + num(pv));
    return o;
}

Outcome domination_suite()
{
    Outcome o;
    const AnisotropicStructure& s = par();
    const ScalarField b = log_rho(s, Point{0.5, 0.5});
    struct Config {
        int m;
        double alpha;
    };
    for (const Config& cfg : {Config{0, 0.0}, Config{0, 1.0}, Config{1, 1.0}, Config{2, 1.0}}) {
        const char* kernel = cfg.alpha == 0.0 ? "odd_coordinate" : "constant_one";
        Experiment e(s, OperatorSpec{builtin_kernel(s, {kernel, 1}), cfg.alpha, std::vector<ScalarField>(cfg.m, b)});
        e.f_family = {bump(s, Point{0.2, 0.1}, 1.0)};
        e.samples = 200;
        e.seed = 2024;
        const VerificationReport r = check_domination(e);
        std::size_t finite = 0;
        for (const CaseResult& c : r.cases) finite += std::isfinite(c.rhs) ? 1 : 0;
        const std::string label = "m=" + std::to_string(cfg.m) + " alpha=" + num(cfg.alpha);
        o.require(r.pass && r.cases.size() == 200, label + ": " + r.notes.front());
        if (r.pass) o.detail += (o.detail.empty() ? "" : "; ") + label + " finite_rhs=" + std::to_string(finite);
    }
    return o;
}

Outcome mean_oscillation_suite()
{
    Outcome o;
    Experiment e = load("mean_oscillation.json");
    e.oscillation_span_decades = 3.0;
    e.campanato_p = 2.0;
    e.campanato_lambda = 0.0;
    e.max_growth = 0.10;
    const VerificationReport r = check_mean_oscillation(e);
    o.require(r.pass, summary(r));
    if (r.pass) o.detail = summary(r);
    return o;
}

Outcome condition_suite()
{
    Outcome o;
    const ConditionParams c = ConditionParams::make(Variant::theorem2_small_s, 3.0, 2.0, {6.0, 6.0}, {0.0, 0.0}, 1.0);
    const auto [phi1, phi2] = power_pair(c);
    const std::vector<double> r_grid = RadiusGrid{1e-2, 1e2, 4}.points();
    const ConditionReport a = check_condition(c, phi1, phi2, r_grid, 1e5);
    const ConditionReport b = check_condition(c, phi1, phi2, r_grid, 2e5);
    o.require(!a.divergent && std::isfinite(a.sup_ratio), "power pair sup_ratio " + num(a.sup_ratio));
    o.require(close(b.sup_ratio, a.sup_ratio, 0.01), "t_max doubling " + num(a.sup_ratio) + " -> " + num(b.sup_ratio));

    ConditionParams edge = c;
    edge.morrey_lambda = edge.p * edge.denominator_exponent();
    const ConditionReport d = check_condition(edge, RadialWeight::power(edge.morrey_lambda, edge.p, edge.gamma),
                                              RadialWeight::monomial(1.0, 0.0), r_grid, 1e5);
    o.require(d.divergent, "boundary exponent not flagged divergent");

    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    bool identity = true;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> v(1 + trial % 17), inv(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            v[i] = std::exp(u(rng));
            inv[i] = 1.0 / v[i];
        }
        // Equal up to the rounding of 1/(1/v).
        identity = identity && close(essinf_grid(v), 1.0 / esssup_grid(inv), 4e-16) &&
                   close(esssup_grid(v), 1.0 / essinf_grid(inv), 4e-16);
    }
    o.require(identity, "essinf/esssup identity");
    if (o.pass) o.detail = "sup_ratio " + num(a.sup_ratio) + " -> " + num(b.sup_ratio);
    return o;
}

Outcome local_estimate_suite()
{
    Outcome o;
    for (const char* name : {"local_estimate_m1.json", "local_estimate_m2.json"}) {
        Experiment e = load(name);
        e.r_grid.r_min = 0.05;
        e.r_grid.r_max = 5.0;
        e.max_growth = 0.15;
        const VerificationReport r = check_local_estimate(e);
        o.require(r.pass && std::isfinite(r.fitted_constant), summary(r));
        if (r.pass) o.detail += (o.detail.empty() ? "" : "; ") + summary(r);
    }
    return o;
}

Outcome boundedness_suite()
{
    Outcome o;
    for (const char* name : {"boundedness_fractional.json", "boundedness_singular.json"}) {
        Experiment e = load(name);
        e.max_growth = 0.15;
        const VerificationReport r = check_boundedness(e);
        const std::string label = std::string(name) + " members=" + std::to_string(e.f_family.size()) + " ";
        o.require(e.f_family.size() >= 12 && !e.f_extension.empty(), label + "family too small");
        o.require(r.pass && std::isfinite(r.fitted_constant), label + summary(r));
        if (r.pass) o.detail += (o.detail.empty() ? "" : "; ") + summary(r);
    }
    return o;
}

Outcome reproducibility_suite()
{
    Outcome o;
    const std::string cfg = std::string(PARABOLIC_CONFIG_DIR) + "/reproducibility.json";
    const char* argv[] = {"parabolic_cli", "verify", "--config", cfg.c_str(), "--format", "csv", "--no-timestamp"};
    std::ostringstream out1, out2, err;
    const int c1 = cli::run(7, argv, out1, err);
    const int c2 = cli::run(7, argv, out2, err);
    o.require(c1 == 0 && c2 == 0, "exit codes " + std::to_string(c1) + "," + std::to_string(c2) + " " + err.str());
    o.require(out1.str() == out2.str(), "CSV outputs differ");
    o.require(out1.str().rfind(std::string(kCsvHeader) + "\n", 0) == 0, "CSV header");
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> suites{
        {"1 metric", metric_suite},
        {"2 geometry", geometry_suite},
        {"3 operator oracles", operator_suite},
        {"4 domination", domination_suite},
        {"5 mean oscillation", mean_oscillation_suite},
        {"6 conditions", condition_suite},
        {"7 local estimates", local_estimate_suite},
        {"8 boundedness", boundedness_suite},
        {"9 reproducibility", reproducibility_suite},
    };
    int failed = 0;
    for (const auto& [name, run] : suites) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %s (%.1fs)%s%s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs,
                    o.detail.empty() ? "" : ": ", o.detail.c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
