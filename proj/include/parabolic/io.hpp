#ifndef PARABOLIC_IO_HPP
#define PARABOLIC_IO_HPP

#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "harness.hpp"

namespace parabolic {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Config parsing. Every error names the offending field.
// ---------------------------------------------------------------------------

namespace config {

inline std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

inline const json& require(const json& j, const std::string& key, const std::string& path)
{
    if (!j.is_object() || !j.contains(key)) throw invalid_input("config field '" + join(path, key) + "' is missing");
    return j.at(key);
}

inline double number(const json& j, const std::string& path)
{
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) {
        const std::string v = j.get<std::string>();
        if (v == "inf" || v == "infinity") return kInf;
    }
    throw invalid_input("config field '" + path + "' must be a number");
}

inline double number(const json& j, const std::string& key, const std::string& path, double fallback)
{
    if (!j.is_object() || !j.contains(key) || j.at(key).is_null()) return fallback;
    return number(j.at(key), join(path, key));
}

inline int integer(const json& j, const std::string& key, const std::string& path, int fallback)
{
    if (!j.is_object() || !j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw invalid_input("config field '" + join(path, key) + "' must be an integer");
    return v.get<int>();
}

inline std::string text(const json& j, const std::string& key, const std::string& path, const std::string& fallback)
{
    if (!j.is_object() || !j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_string()) throw invalid_input("config field '" + join(path, key) + "' must be a string");
    return v.get<std::string>();
}

inline std::vector<double> numbers(const json& j, const std::string& path)
{
    if (!j.is_array()) throw invalid_input("config field '" + path + "' must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

inline Point point(const AnisotropicStructure& s, const json& j, const std::string& path)
{
    const std::vector<double> v = numbers(j, path);
    if (v.size() != s.dim()) {
        throw invalid_input("config field '" + path + "' must have " + std::to_string(s.dim()) + " coordinates");
    }
    Point p = Point::from(v);
    if (!p.finite()) throw invalid_input("config field '" + path + "' must be finite");
    return p;
}

/// Rethrows structural errors with the field path prepended.
template <class Fn>
auto at_field(const std::string& path, Fn&& fn) -> decltype(fn())
{
    try {
        return fn();
    } catch (const invalid_input& e) {
        const std::string what = e.what();
        if (what.rfind("config field", 0) == 0) throw;
        throw invalid_input("config field '" + path + "': " + what);
    }
}

inline AnisotropicStructure structure(const json& root)
{
    const json& j = require(root, "structure", "");
    return at_field("structure", [&] {
        return AnisotropicStructure(numbers(require(j, "exponents", "structure"), "structure.exponents"),
                                    number(j, "k", "structure", 1.0));
    });
}

inline RoughKernel kernel(const AnisotropicStructure& s, const json& j, const std::string& path)
{
    return at_field(path, [&] {
        KernelSpec spec;
        spec.name = text(j, "name", path, "constant_one");
        spec.index = integer(j, "index", path, integer(j, "i", path, 1));
        spec.frequency = integer(j, "frequency", path, 1);
        RoughKernel k = builtin_kernel(s, spec);
        const double sexp = number(j, "s", path, kInf);
        if (!std::isinf(sexp)) {
            return RoughKernel(s, k.name(), [k](const Point& w) { return k.on_sphere(w); }, sexp, k.mean_zero());
        }
        return k;
    });
}

inline ScalarField field(const AnisotropicStructure& s, const json& j, const std::string& path)
{
    return at_field(path, [&] {
        FieldSpec spec;
        spec.name = text(j, "name", path, "constant");
        spec.R = number(j, "R", path, 1.0);
        spec.beta = number(j, "beta", path, 1.0);
        spec.value = number(j, "value", path, 1.0);
        spec.index = integer(j, "index", path, 1);
        if (j.contains("center")) spec.center = numbers(j.at("center"), join(path, "center"));
        return builtin_field(s, spec);
    });
}

inline std::vector<ScalarField> fields(const AnisotropicStructure& s, const json& j, const std::string& path)
{
    if (!j.is_array()) throw invalid_input("config field '" + path + "' must be an array");
    std::vector<ScalarField> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(field(s, j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

/// {"kernel": {...}, "alpha": a, "symbols": [field, ...]}
inline OperatorSpec operator_spec(const AnisotropicStructure& s, const json& root)
{
    const json& j = require(root, "operator", "");
    OperatorSpec spec{kernel(s, j.contains("kernel") ? j.at("kernel") : json::object(), "operator.kernel"),
                      number(j, "alpha", "operator", 0.0),
                      {}};
    if (j.contains("symbols")) spec.symbols = fields(s, j.at("symbols"), "operator.symbols");
    else if (j.contains("b")) spec.symbols = fields(s, j.at("b"), "operator.b");
    if (!(spec.alpha >= 0.0) || !(spec.alpha < s.gamma())) {
        throw invalid_input("config field 'operator.alpha' must lie in [0, gamma)");
    }
    return spec;
}

/// {"kind": "power", "lambda": λ} | {"kind": "monomial", "c": c, "a": a} | {"kind": "builtin", "name": ...},
/// or the short forms {"power": {"lambda": λ, "p": p}} and {"custom": name}.
inline RadialWeight weight(const json& j, const std::string& path, double gamma, double p)
{
    return at_field(path, [&] {
        if (j.is_object() && j.contains("power")) {
            const json& pw = j.at("power");
            const std::string sub = join(path, "power");
            return RadialWeight::power(number(pw, "lambda", sub, 0.0), number(pw, "p", sub, p), gamma);
        }
        if (j.is_object() && j.contains("custom")) {
            const json& c = j.at("custom");
            if (!c.is_string()) throw invalid_input("config field '" + join(path, "custom") + "' must be a weight name");
            return builtin_weight(c.get<std::string>(), gamma, p);
        }
        const std::string kind = text(j, "kind", path, "power");
        if (kind == "power") return RadialWeight::power(number(j, "lambda", path, 0.0), number(j, "p", path, p), gamma);
        if (kind == "monomial") {
            return RadialWeight::monomial(number(require(j, "c", path), join(path, "c")),
                                          number(require(j, "a", path), join(path, "a")));
        }
        if (kind == "builtin") return builtin_weight(text(j, "name", path, "constant"), gamma, p);
        throw invalid_input("config field '" + join(path, "kind") + "' must be power, monomial or builtin");
    });
}

inline RadiusGrid grid(const json& j, const std::string& path, RadiusGrid fallback)
{
    RadiusGrid g{number(j, "r_min", path, fallback.r_min), number(j, "r_max", path, fallback.r_max),
                 integer(j, "ppd", path, fallback.ppd)};
    at_field(path, [&] {
        g.validate();
        return 0;
    });
    return g;
}

/// {"variant", "p", "p_i", "lambda_i", "alpha", "s", "morrey_lambda"}; q and q1 are derived.
inline ConditionParams conditions(const AnisotropicStructure& s, const json& root)
{
    const json& j = require(root, "conditions", "");
    return at_field("conditions", [&] {
        const Variant v = variant_from_string(text(j, "variant", "conditions", "theorem1_small_s"));
        std::vector<double> p_i = j.contains("p_i") ? numbers(j.at("p_i"), "conditions.p_i") : std::vector<double>{};
        std::vector<double> lambda_i =
            j.contains("lambda_i") ? numbers(j.at("lambda_i"), "conditions.lambda_i") : std::vector<double>(p_i.size(), 0.0);
        if (lambda_i.size() != p_i.size()) {
            throw invalid_input("config field 'conditions.lambda_i' must have as many entries as p_i");
        }
        return ConditionParams::make(v, s.gamma(), number(require(j, "p", "conditions"), "conditions.p"),
                                     std::move(p_i), std::move(lambda_i), number(j, "alpha", "conditions", 0.0),
                                     number(j, "s", "conditions", kInf), number(j, "morrey_lambda", "conditions", 0.0));
    });
}

inline std::optional<std::pair<RadialWeight, RadialWeight>> weights(const json& root, const ConditionParams& c)
{
    if (!root.contains("weights")) return std::nullopt;
    const json& j = root.at("weights");
    return std::make_pair(weight(require(j, "phi1", "weights"), "weights.phi1", c.gamma, c.p),
                          weight(require(j, "phi2", "weights"), "weights.phi2", c.gamma, c.p));
}

inline OperatorOptions operator_options(const json& j, const std::string& path, OperatorOptions o)
{
    o.azimuth_nodes = static_cast<std::size_t>(integer(j, "azimuth_nodes", path, static_cast<int>(o.azimuth_nodes)));
    o.order = integer(j, "order", path, o.order);
    o.subcells = integer(j, "subcells", path, o.subcells);
    o.singular_levels = integer(j, "singular_levels", path, o.singular_levels);
    o.pv_halvings = integer(j, "pv_halvings", path, o.pv_halvings);
    o.pv_tolerance = number(j, "pv_tolerance", path, o.pv_tolerance);
    return o;
}

inline SpaceOptions space_options(const json& j, const std::string& path, SpaceOptions o)
{
    o.azimuth_nodes = static_cast<std::size_t>(integer(j, "azimuth_nodes", path, static_cast<int>(o.azimuth_nodes)));
    o.order = integer(j, "order", path, o.order);
    o.subcells = integer(j, "subcells", path, o.subcells);
    o.singular_levels = integer(j, "singular_levels", path, o.singular_levels);
    return o;
}

/// Family: an explicit array of fields, or {"first_decade", "decades",
/// "extension_decades"} for the bump/indicator scale family.
inline void family(Experiment& e, const json& root)
{
    if (!root.contains("family")) return;
    const json& j = root.at("family");
    if (j.is_array()) {
        e.f_family = fields(e.structure, j, "family");
        return;
    }
    if (j.contains("members")) {
        e.f_family = fields(e.structure, j.at("members"), "family.members");
        if (j.contains("extension")) e.f_extension = fields(e.structure, j.at("extension"), "family.extension");
        return;
    }
    const int first = integer(j, "first_decade", "family", -1);
    const int decades = integer(j, "decades", "family", 3);
    const int extra = integer(j, "extension_decades", "family", 1);
    if (decades < 1 || extra < 0) throw invalid_input("config field 'family.decades' must be >= 1");
    e.f_family = scale_family(e.structure, e.x0, first, decades);
    e.f_extension = scale_family(e.structure, e.x0, first + decades, extra);
}

inline Experiment experiment(const json& root)
{
    const AnisotropicStructure s = structure(root);
    Experiment e(s, operator_spec(s, root));
    e.name = text(root, "name", "", "experiment");
    if (root.contains("x0")) e.x0 = point(s, root.at("x0"), "x0");
    e.params = root.contains("conditions")
                   ? conditions(s, root)
                   : ConditionParams::make(Variant::theorem1_small_s, s.gamma(), 2.0, {}, {});
    e.weights = weights(root, e.params);
    family(e, root);
    if (root.contains("grid")) e.r_grid = grid(root.at("grid"), "grid", e.r_grid);
    if (root.contains("member_grid")) e.member_grid = grid(root.at("member_grid"), "member_grid", e.member_grid);
    if (root.contains("mean_oscillation")) {
        const json& l = root.at("mean_oscillation");
        e.campanato_p = number(l, "p", "mean_oscillation", e.campanato_p);
        e.campanato_lambda = number(l, "lambda", "mean_oscillation", e.campanato_lambda);
        e.oscillation_span_decades = number(l, "span_decades", "mean_oscillation", e.oscillation_span_decades);
    }
    if (root.contains("t_grid")) {
        e.t_ppd = integer(root.at("t_grid"), "ppd", "t_grid", e.t_ppd);
        e.t_decades = integer(root.at("t_grid"), "decades", "t_grid", e.t_decades);
    }
    if (root.contains("pointwise")) {
        const json& pw = root.at("pointwise");
        if (pw.contains("r")) e.pointwise_r = numbers(pw.at("r"), "pointwise.r");
        e.pointwise_samples = static_cast<std::size_t>(integer(pw, "samples", "pointwise", 50));
    }
    const int samples = integer(root, "samples", "", 200);
    if (samples < 1) throw invalid_input("config field 'samples' must be positive");
    e.samples = static_cast<std::size_t>(samples);
    if (root.contains("seed")) {
        const json& sd = root.at("seed");
        if (!sd.is_number_unsigned() && !sd.is_number_integer()) {
            throw invalid_input("config field 'seed' must be a non-negative integer");
        }
        e.seed = sd.get<std::uint64_t>();
    }
    e.max_growth = number(root, "max_growth", "", e.max_growth);
    if (root.contains("options")) {
        const json& o = root.at("options");
        if (o.contains("inner")) e.inner = operator_options(o.at("inner"), "options.inner", e.inner);
        if (o.contains("outer")) e.outer = space_options(o.at("outer"), "options.outer", e.outer);
    }
    return e;
}

inline json load(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot read config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw invalid_input("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

} // namespace config

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

/// %.10g; nan and ±inf spelled out.
inline std::string format_number(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

/// JSON number token with 10 significant digits; non-finite values become strings.
inline std::string json_number(double v)
{
    if (!std::isfinite(v)) return "\"" + format_number(v) + "\"";
    return format_number(v);
}

inline std::string json_string(const std::string& s) { return json(s).dump(); }

inline std::string json_array(const std::vector<double>& v)
{
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + json_number(v[i]);
    return out + "]";
}

inline std::string to_json(const ConditionReport& r)
{
    return "{\"variant\":" + json_string(to_string(r.variant)) + ",\"sup_ratio\":" + json_number(r.sup_ratio) +
           ",\"divergent\":" + (r.divergent ? "true" : "false") + ",\"r_grid\":" + json_array(r.r_grid) +
           ",\"I\":" + json_array(r.integral) + "}";
}

inline std::string to_json(const VerificationReport& r)
{
    std::string out = "{\"check_name\":" + json_string(r.check_name) + ",\"status\":" + json_string(r.status) +
                      ",\"pass\":" + (r.pass ? "true" : "false") + ",\"fitted_constant\":" +
                      json_number(r.fitted_constant) + ",\"refined_constant\":" + json_number(r.refined_constant) +
                      ",\"growth\":" + json_number(r.growth) + ",\"runtime_seconds\":" +
                      json_number(r.runtime_seconds) + ",\"notes\":[";
    for (std::size_t i = 0; i < r.notes.size(); ++i) out += (i ? "," : "") + json_string(r.notes[i]);
    out += "],\"cases\":[";
    for (std::size_t i = 0; i < r.cases.size(); ++i) {
        const CaseResult& c = r.cases[i];
        out += std::string(i ? "," : "") + "{\"case_id\":" + json_string(c.case_id) + ",\"r\":" + json_number(c.r) +
               ",\"t\":" + json_number(c.t) + ",\"lhs\":" + json_number(c.lhs) + ",\"rhs\":" + json_number(c.rhs) +
               ",\"ratio\":" + json_number(c.ratio) + ",\"status\":" + json_string(c.status) + "}";
    }
    return out + "]}";
}

inline std::string to_json(const std::vector<VerificationReport>& reports)
{
    std::string out = "{\"reports\":[";
    for (std::size_t i = 0; i < reports.size(); ++i) out += (i ? "," : "") + to_json(reports[i]);
    return out + "]}\n";
}

inline constexpr const char* kCsvHeader = "check_name,case_id,r,t,lhs,rhs,ratio,status";

/// Quotes a CSV cell when it holds a separator or quote.
inline std::string csv_cell(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string csv_number(double v) { return std::isnan(v) ? "" : format_number(v); }

inline std::string utc_timestamp()
{
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Flat CSV of every case; an optional first line "# generated <UTC time>".
inline std::string to_csv(const std::vector<VerificationReport>& reports, bool timestamp)
{
    std::ostringstream out;
    if (timestamp) out << "# generated " << utc_timestamp() << "\n";
    out << kCsvHeader << "\n";
    for (const VerificationReport& r : reports) {
        for (const CaseResult& c : r.cases) {
            out << csv_cell(r.check_name) << ',' << csv_cell(c.case_id) << ',' << csv_number(c.r) << ','
                << csv_number(c.t) << ',' << csv_number(c.lhs) << ',' << csv_number(c.rhs) << ','
                << csv_number(c.ratio) << ',' << csv_cell(c.status) << "\n";
        }
    }
    return out.str();
}

/// Writes through a temporary file in the same directory and renames it.
inline void write_atomic(const std::string& path, const std::string& content)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw invalid_input("cannot write output file '" + path + "'");
        out << content;
        out.flush();
        if (!out) throw error("failed writing output file '" + path + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw error("cannot move output into place at '" + path + "'");
    }
}

} // namespace parabolic

#endif // PARABOLIC_IO_HPP
