#ifndef PARABOLIC_CLI_HPP
#define PARABOLIC_CLI_HPP

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "io.hpp"
#include "parabolic.hpp"

namespace parabolic::cli {

enum ExitCode : int { kSuccess = 0, kCheckFailed = 1, kConfigError = 2 };

struct RunConfig {
    std::string command;
    std::string config_path;
    std::string output;  // empty: stdout
    std::string format = "json";
    int threads = 0;     // 0: THREADS or hardware concurrency
    bool timestamp = true;
    std::string exponents;
    std::string point;
    double r = 1.0;
};

namespace detail {

inline std::vector<double> parse_list(const std::string& text, const std::string& flag)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw invalid_input("flag " + flag + ": '" + item + "' is not a number");
        }
    }
    if (out.empty()) throw invalid_input("flag " + flag + " needs a comma-separated list");
    return out;
}

/// Output of one command: the JSON document and its CSV rendering.
struct Result {
    std::string json;
    std::string csv;  // without timestamp line
    int code = kSuccess;
};

inline std::string kv_csv(const std::vector<std::pair<std::string, double>>& rows)
{
    std::string out = "quantity,value\n";
    for (const auto& [k, v] : rows) out += k + "," + format_number(v) + "\n";
    return out;
}

inline std::string kv_json(const std::vector<std::pair<std::string, double>>& rows)
{
    std::string out = "{";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out += (i ? "," : "") + json_string(rows[i].first) + ":" + json_number(rows[i].second);
    }
    return out + "}\n";
}

inline Result key_values(const std::vector<std::pair<std::string, double>>& rows)
{
    return {kv_json(rows), kv_csv(rows), kSuccess};
}

inline AnisotropicStructure structure_from(const RunConfig& rc, const json* root)
{
    if (!rc.exponents.empty()) return AnisotropicStructure(parse_list(rc.exponents, "--exponents"));
    if (root) return config::structure(*root);
    throw invalid_input("--exponents or --config is required");
}

inline Result metric(const RunConfig& rc)
{
    json root;
    const bool has_config = !rc.config_path.empty();
    if (has_config) root = config::load(rc.config_path);
    const AnisotropicStructure s = structure_from(rc, has_config ? &root : nullptr);
    Point x;
    if (!rc.point.empty()) {
        const std::vector<double> v = parse_list(rc.point, "--point");
        if (v.size() != s.dim()) throw invalid_input("flag --point must have " + std::to_string(s.dim()) + " coordinates");
        x = Point::from(v);
    } else if (has_config) {
        x = config::point(s, config::require(root, "point", ""), "point");
    } else {
        throw invalid_input("--point or a config with 'point' is required");
    }
    return key_values({{"rho", s.rho(x)}});
}

inline Result volume(const RunConfig& rc)
{
    json root;
    const bool has_config = !rc.config_path.empty();
    if (has_config) root = config::load(rc.config_path);
    const AnisotropicStructure s = structure_from(rc, has_config ? &root : nullptr);
    double r = rc.r;
    if (has_config && root.contains("r")) r = config::number(root.at("r"), "r");
    if (!(r > 0.0) || !std::isfinite(r)) throw invalid_input("radius r must be positive");
    return key_values({{"volume", s.ellipsoid_volume(r)}, {"unit_measure", s.unit_measure()}, {"gamma", s.gamma()}});
}

/// {"structure", "field", "x0", "norm": {"type": lp|morrey|classical_morrey|campanato, ...}}
inline Result norm(const json& root)
{
    const AnisotropicStructure s = config::structure(root);
    const ScalarField f = config::field(s, config::require(root, "field", ""), "field");
    const Point x0 = root.contains("x0") ? config::point(s, root.at("x0"), "x0") : zero_point(s.dim());
    const json& n = config::require(root, "norm", "");
    const std::string type = config::text(n, "type", "norm", "lp");
    const double p = config::number(n, "p", "norm", 2.0);
    const RadiusGrid grid = config::grid(n.contains("grid") ? n.at("grid") : json::object(), "norm.grid", RadiusGrid{});
    double value = 0.0;
    if (type == "lp") {
        value = config::at_field("norm", [&] {
            return lp_norm_ellipsoid(s, f, p, x0, config::number(config::require(n, "r", "norm"), "norm.r"));
        });
    } else if (type == "morrey") {
        const RadialWeight w = config::weight(config::require(n, "weight", "norm"), "norm.weight", s.gamma(), p);
        value = config::at_field("norm", [&] { return morrey_norm(s, f, p, w, x0, grid); });
    } else if (type == "classical_morrey") {
        value = config::at_field(
            "norm", [&] { return classical_morrey_norm(s, f, p, config::number(n, "lambda", "norm", 0.0), x0, grid); });
    } else if (type == "campanato") {
        value = config::at_field(
            "norm", [&] { return campanato_norm(s, f, p, config::number(n, "lambda", "norm", 0.0), x0, grid); });
    } else {
        throw invalid_input("config field 'norm.type' must be lp, morrey, classical_morrey or campanato");
    }
    return key_values({{type, value}});
}

/// {"structure", "operator", "field", "op": {"kind": ...}, "points": [[...], ...], "t_grid": {...}}
inline Result op(const json& root)
{
    const AnisotropicStructure s = config::structure(root);
    const OperatorSpec spec = config::operator_spec(s, root);
    const ScalarField f = config::field(s, config::require(root, "field", ""), "field");
    const json& o = root.contains("op") ? root.at("op") : json::object();
    const std::string kind = config::text(o, "kind", "op", "commutator");
    const OperatorOptions opt = config::operator_options(o, "op", OperatorOptions{});
    const json& pts = config::require(root, "points", "");
    if (!pts.is_array() || pts.empty()) throw invalid_input("config field 'points' must be a non-empty array");
    std::vector<Point> xs;
    for (std::size_t i = 0; i < pts.size(); ++i) xs.push_back(config::point(s, pts[i], "points[" + std::to_string(i) + "]"));
    const json tg = root.contains("t_grid") ? root.at("t_grid") : json::object();
    const std::vector<double> t_grid = config::at_field("t_grid", [&] {
        return default_t_grid(config::number(tg, "scale", "t_grid", 1.0), config::integer(tg, "ppd", "t_grid", 64),
                              config::integer(tg, "decades", "t_grid", 3));
    });
    if (kind != "commutator" && kind != "maximal" && kind != "dominating" && kind != "fractional" && kind != "singular") {
        throw invalid_input("config field 'op.kind' must be commutator, maximal, dominating, fractional or singular");
    }
    std::vector<double> values(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        if (kind == "commutator") values[i] = commutator(s, spec, f, xs[i], opt);
        else if (kind == "maximal") values[i] = maximal(s, spec, f, xs[i], t_grid, opt);
        else if (kind == "dominating") values[i] = dominating(s, spec, f, xs[i], opt);
        else if (kind == "fractional") values[i] = fractional_integral(s, spec, f, xs[i], opt);
        else values[i] = singular_integral(s, spec, f, xs[i], opt);
    });
    Result r;
    r.json = "{\"kind\":" + json_string(kind) + ",\"values\":" + json_array(values) + "}\n";
    r.csv = "case_id";
    for (std::size_t d = 0; d < s.dim(); ++d) r.csv += ",x" + std::to_string(d + 1);
    r.csv += ",value\n";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        r.csv += "p" + std::to_string(i);
        for (std::size_t d = 0; d < s.dim(); ++d) r.csv += "," + format_number(xs[i][d]);
        r.csv += "," + format_number(values[i]) + "\n";
    }
    return r;
}

/// {"structure", "conditions", "weights"?, "grid", "t_max"}
inline Result conditions(const json& root)
{
    const AnisotropicStructure s = config::structure(root);
    const ConditionParams c = config::conditions(s, root);
    const auto w = config::weights(root, c);
    const auto [phi1, phi2] = w ? *w : config::at_field("conditions", [&] { return power_pair(c); });
    const RadiusGrid grid = config::grid(root.contains("grid") ? root.at("grid") : json::object(), "grid", RadiusGrid{});
    const double t_max = config::number(root, "t_max", "", grid.r_max * 1e3);
    const ConditionReport rep = check_condition(c, phi1, phi2, grid.points(), t_max);
    Result r;
    r.json = to_json(rep) + "\n";
    r.csv = "r,I,rhs,ratio\n";
    for (std::size_t k = 0; k < rep.r_grid.size(); ++k) {
        r.csv += format_number(rep.r_grid[k]) + "," + format_number(rep.integral[k]) + "," + format_number(rep.rhs[k]) +
                 "," + format_number(rep.integral[k] / rep.rhs[k]) + "\n";
    }
    r.code = rep.divergent || !std::isfinite(rep.sup_ratio) ? kCheckFailed : kSuccess;
    return r;
}

/// Experiment config plus "checks": [mean_oscillation, local_estimate, pointwise, boundedness, domination].
inline Result verify(const json& root)
{
    const Experiment e = config::experiment(root);
    std::vector<std::string> checks{"mean_oscillation", "local_estimate", "pointwise", "boundedness", "domination"};
    if (root.contains("checks")) {
        const json& c = root.at("checks");
        if (!c.is_array()) throw invalid_input("config field 'checks' must be an array of names");
        checks.clear();
        for (std::size_t i = 0; i < c.size(); ++i) {
            if (!c[i].is_string()) throw invalid_input("config field 'checks[" + std::to_string(i) + "]' must be a string");
            checks.push_back(c[i].get<std::string>());
        }
    }
    for (const std::string& name : checks) {
        if (name != "mean_oscillation" && name != "local_estimate" && name != "pointwise" && name != "boundedness" &&
            name != "domination") {
            throw invalid_input("config field 'checks': unknown check '" + name + "'");
        }
    }
    std::vector<VerificationReport> reports;
    for (const std::string& name : checks) {
        if (name == "mean_oscillation") reports.push_back(check_mean_oscillation(e));
        else if (name == "local_estimate") reports.push_back(check_local_estimate(e));
        else if (name == "pointwise") reports.push_back(check_pointwise_estimates(e));
        else if (name == "boundedness") reports.push_back(check_boundedness(e));
        else reports.push_back(check_domination(e));
    }
    Result r;
    r.json = to_json(reports);
    r.csv = to_csv(reports, false);
    for (const VerificationReport& rep : reports) {
        if (!rep.pass) r.code = kCheckFailed;
    }
    return r;
}

inline Result dispatch(const RunConfig& rc)
{
    if (rc.command == "metric") return metric(rc);
    if (rc.command == "volume") return volume(rc);
    if (rc.config_path.empty()) throw invalid_input("--config is required for '" + rc.command + "'");
    const json root = config::load(rc.config_path);
    if (rc.command == "norm") return norm(root);
    if (rc.command == "op") return op(root);
    if (rc.command == "conditions") return conditions(root);
    return verify(root);
}

} // namespace detail

/// Parses argv, runs the subcommand and writes its output. Exit codes: 0
/// success, 1 failed check, 2 usage or config error.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Anisotropic operators, Morrey/Campanato norms and inequality checks"};
    app.require_subcommand(1);
    RunConfig rc;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"metric", "rho(x) for the given exponents"},
        {"volume", "|E(0, r)| = unit measure * r^gamma"},
        {"norm", "Lp, Morrey or Campanato norm of a field"},
        {"op", "operator values at points"},
        {"conditions", "evaluate the (phi1, phi2) condition integral"},
        {"verify", "run verification checks from an experiment config"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", rc.config_path, "JSON config file");
        sub->add_option("--output", rc.output, "output file (default stdout)");
        sub->add_option("--format", rc.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", rc.threads, "worker threads (default: THREADS or all cores)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--no-timestamp{false}", rc.timestamp, "omit the CSV timestamp line");
        if (name == "metric" || name == "volume") sub->add_option("--exponents", rc.exponents, "comma-separated exponents");
        if (name == "metric") sub->add_option("--point", rc.point, "comma-separated coordinates");
        if (name == "volume") sub->add_option("--r", rc.r, "radius");
        sub->callback([&rc, name = name] { rc.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kSuccess;
    } catch (const CLI::ParseError& e) {
        std::ostringstream msg;
        app.exit(e, msg, msg);
        err << msg.str();
        return kConfigError;
    }
    if (rc.threads > 0) set_thread_count(rc.threads);
    try {
        detail::Result res = detail::dispatch(rc);
        std::string text = res.json;
        if (rc.format == "csv") text = (rc.timestamp ? "# generated " + utc_timestamp() + "\n" : "") + res.csv;
        if (rc.output.empty()) out << text;
        else write_atomic(rc.output, text);
        return res.code;
    } catch (const invalid_input& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const precondition_error& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
}

} // namespace parabolic::cli

#endif // PARABOLIC_CLI_HPP
