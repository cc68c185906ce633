#include "catch_amalgamated.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "parabolic/cli.hpp"

using namespace parabolic;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run call(std::vector<std::string> args)
{
    args.insert(args.begin(), "parabolic_cli");
    std::vector<const char*> argv;
    for (const std::string& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string config_path(const char* name) { return std::string(PARABOLIC_CONFIG_DIR) + "/" + name; }

std::string write_temp(const std::string& name, const std::string& content)
{
    const std::string path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream(path) << content;
    return path;
}

} // namespace

TEST_CASE("metric and volume")
{
    const Run m = call({"metric", "--exponents", "1,2", "--point", "1,1"});
    REQUIRE(m.code == 0);
    // Output carries 10 significant digits.
    const json j = json::parse(m.out);
    CHECK(j.at("rho").get<double>() == Catch::Approx(std::sqrt((1.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-9));

    const Run v = call({"volume", "--exponents", "1,2", "--r", "2", "--format", "csv", "--no-timestamp"});
    REQUIRE(v.code == 0);
    CHECK(v.out.rfind("quantity,value\nvolume,", 0) == 0);
    CHECK(v.out.find("gamma,3") != std::string::npos);
}

TEST_CASE("usage and config errors exit with 2")
{
    CHECK(call({}).code == 2);
    CHECK(call({"metric", "--exponents", "1,x", "--point", "1,1"}).code == 2);
    CHECK(call({"metric", "--exponents", "1,2", "--point", "1"}).code == 2);
    CHECK(call({"volume", "--exponents", "1,2", "--r", "-1"}).code == 2);
    CHECK(call({"verify"}).code == 2);

    const Run missing = call({"verify", "--config", "/nonexistent/parabolic.json"});
    CHECK(missing.code == 2);
    CHECK(missing.err.find("cannot read config file") != std::string::npos);

    const std::string bad_json = write_temp("parabolic_cli_bad.json", "{\"structure\": ");
    CHECK(call({"norm", "--config", bad_json}).code == 2);

    const std::string bad_field = write_temp("parabolic_cli_field.json", R"({
      "structure": {"exponents": [1, 2]},
      "field": {"name": "bump", "R": -1},
      "norm": {"type": "lp", "p": 2, "r": 1}
    })");
    const Run f = call({"norm", "--config", bad_field});
    CHECK(f.code == 2);
    CHECK(f.err.find("field") != std::string::npos);

    const std::string bad_check = write_temp("parabolic_cli_check.json", R"({
      "structure": {"exponents": [1, 2]},
      "operator": {"alpha": 0},
      "checks": ["bogus"]
    })");
    CHECK(call({"verify", "--config", bad_check}).code == 2);
}

TEST_CASE("norm and op commands")
{
    const Run n = call({"norm", "--config", config_path("norm_campanato.json")});
    REQUIRE(n.code == 0);
    CHECK(json::parse(n.out).at("campanato").get<double>() == Catch::Approx(1.0 / 3.0).epsilon(1e-3));

    const std::string op_cfg = write_temp("parabolic_cli_op.json", R"({
      "structure": {"exponents": [1, 2]},
      "operator": {"kernel": {"name": "constant_one"}, "alpha": 1, "symbols": [{"name": "rho_power", "beta": 1}]},
      "field": {"name": "indicator_ellipsoid", "R": 1},
      "op": {"kind": "commutator"},
      "points": [[0, 0]]
    })");
    const Run o = call({"op", "--config", op_cfg});
    REQUIRE(o.code == 0);
    CHECK(json::parse(o.out).at("values")[0].get<double>() == Catch::Approx(-1.5 * kPi).epsilon(1e-4));
}

TEST_CASE("conditions command")
{
    const Run c = call({"conditions", "--config", config_path("conditions.json")});
    REQUIRE(c.code == 0);
    const json j = json::parse(c.out);
    CHECK_FALSE(j.at("divergent").get<bool>());
    CHECK(j.at("sup_ratio").get<double>() <= 1.0);

    const Run csv = call({"conditions", "--config", config_path("conditions.json"), "--format", "csv", "--no-timestamp"});
    CHECK(csv.out.rfind("r,I,rhs,ratio\n", 0) == 0);
}

TEST_CASE("verify csv is reproducible")
{
    const std::vector<std::string> args{"verify", "--config", config_path("reproducibility.json"), "--format", "csv",
                                        "--no-timestamp"};
    const Run a = call(args);
    const Run b = call(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(a.out.rfind("check_name,case_id,r,t,lhs,rhs,ratio,status\n", 0) == 0);

    std::vector<std::string> stamped(args.begin(), args.end() - 1);
    const Run s = call(stamped);
    CHECK(s.out.rfind("# generated ", 0) == 0);

    const std::string path = (std::filesystem::temp_directory_path() / "parabolic_cli_out.json").string();
    std::remove(path.c_str());
    const Run to_file = call({"verify", "--config", config_path("reproducibility.json"), "--output", path});
    CHECK(to_file.code == 0);
    CHECK(to_file.out.empty());
    std::ifstream in(path);
    const json j = json::parse(in);
    CHECK(j.is_object());
}
