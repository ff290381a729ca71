#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kcex/errors.hpp"
#include "kcex/report.hpp"
#include "kcex/scenario.hpp"

using namespace kcex;

namespace {

constexpr double kPi = std::numbers::pi;

std::filesystem::path out_dir()
{
    const auto dir = std::filesystem::temp_directory_path() / "kcex_scenario_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::string kirchhoff_config(const std::string& mode, const std::string& out,
                             const std::string& extra = "")
{
    return std::string("{\n"
                       "  \"domain\": {\"kind\": \"interval\", \"a\": -1.5707963267948966, "
                       "\"b\": 1.5707963267948966},\n"
                       "  \"M\": {\"kind\": \"affine\", \"a\": 1, \"b\": 1},\n"
                       "  \"mode\": \"") +
           mode + "\",\n  \"t1\": 1.0, \"t2\": 4.0,\n" + extra +
           "  \"output_path\": \"" + out + "\"\n}\n";
}

} // namespace

TEST_CASE("config parsing fills defaults and validates fields")
{
    const ScenarioConfig cfg = parse_config_text(kirchhoff_config("SSM", "x.json"));
    CHECK(cfg.mode == ScenarioMode::Ssm);
    CHECK(cfg.t1 == 1.0);
    CHECK(cfg.t2 == 4.0);
    CHECK_FALSE(cfg.h.has_value());
    CHECK_FALSE(cfg.tau.has_value());
    CHECK(cfg.t_max == 10.0);
    CHECK(cfg.n_grid == 512);
    CHECK(cfg.output_path == "x.json");
    CHECK(std::holds_alternative<Interval>(cfg.domain.shape));
}

TEST_CASE("config parsing rejects malformed documents")
{
    CHECK_THROWS_AS(parse_config_text("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[1,2]"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"mode\": \"SSM\"}"), ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"domain": {"kind": "interval", "a": 0, "b": 1},
        "M": {"kind": "affine", "a": 1, "b": 1}, "mode": "BOGUS"})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"domain": {"kind": "interval", "a": 1, "b": 0},
        "M": {"kind": "affine", "a": 1, "b": 1}, "mode": "SSM"})"),
                    ConfigError);
    // t1 without t2, reversed pair, bad h
    CHECK_THROWS_AS(parse_config_text(R"({"domain": {"kind": "interval", "a": 0, "b": 1},
        "M": {"kind": "affine", "a": 1, "b": 1}, "mode": "SSM", "t1": 1.0})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"domain": {"kind": "interval", "a": 0, "b": 1},
        "M": {"kind": "affine", "a": 1, "b": 1}, "mode": "SSM", "t1": 4.0, "t2": 1.0})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config_text(R"({"domain": {"kind": "interval", "a": 0, "b": 1},
        "M": {"kind": "affine", "a": 1, "b": 1}, "mode": "SSM", "h": -0.5})"),
                    ConfigError);
}

TEST_CASE("dump_config round-trips byte-for-byte")
{
    ScenarioConfig cfg = parse_config_text(
        kirchhoff_config("WEAK_CP", "out.json", "  \"tau\": 0.5, \"h\": 0.01,\n"));
    const std::string once = dump_config(cfg);
    const std::string twice = dump_config(parse_config_text(once));
    CHECK(once == twice);

    // tabulated kind round-trips through inline arrays
    const ScenarioConfig tab = parse_config_text(
        R"({"domain": {"kind": "disk", "cx": 0, "cy": 0, "radius": 1},
            "M": {"kind": "tabulated", "t": [0, 1, 2.5], "values": [3, 2, 1]},
            "mode": "CLASSIFY"})");
    const std::string d1 = dump_config(tab);
    CHECK(d1 == dump_config(parse_config_text(d1)));
}

TEST_CASE("tabulated M loads from a two-column CSV")
{
    const auto csv = out_dir() / "mvals.csv";
    {
        std::ofstream os(csv);
        os << "t,M\n0,3.0\n1,2.0\n2,1.5\n";
    }
    const ScenarioConfig cfg = parse_config_text(
        std::string(R"({"domain": {"kind": "interval", "a": 0, "b": 1},
            "M": {"kind": "tabulated", "csv": ")") +
        csv.string() + R"("}, "mode": "CLASSIFY"})");
    CHECK(eval_M(cfg.M, 0.5) == doctest::Approx(2.5));
    CHECK(eval_M(cfg.M, 2.0) == doctest::Approx(1.5));
}

TEST_CASE("classify scenario writes a deterministic report")
{
    const auto out = out_dir() / "classify.json";
    ScenarioConfig cfg = parse_config_text(
        R"({"domain": {"kind": "interval", "a": -1, "b": 1},
            "M": {"kind": "affine", "a": 1, "b": 1}, "mode": "CLASSIFY",
            "output_path": ")" +
        out.string() + R"("})");
    std::ostringstream diag;
    CHECK(run_scenario(cfg, diag) == 0);
    const std::string first = slurp(out);
    CHECK(first.find("\"verdict\": \"CP_FAILS_BY_INCREASE\"") != std::string::npos);
    CHECK(first.find("\"nonincreasing\": false") != std::string::npos);
    CHECK(first.find("\"grid\"") != std::string::npos);
    CHECK(run_scenario(cfg, diag) == 0);
    CHECK(slurp(out) == first);
}

TEST_CASE("SSM scenario at coarse resolution certifies end to end")
{
    const auto out = out_dir() / "ssm_coarse.json";
    ScenarioConfig cfg = parse_config_text(kirchhoff_config("SSM", out.string()));
    cfg.h = kPi / 200;
    std::ostringstream diag;
    CHECK(run_scenario(cfg, diag) == 0);
    const std::string report = slurp(out);
    CHECK(report.find("\"verdict\": \"CERTIFIED_FAILURE\"") != std::string::npos);
    CHECK(report.find("\"mode\": \"SSM\"") != std::string::npos);
    for (const char* key : {"\"tau\"", "\"theta\"", "\"alpha\"", "\"A\"", "\"epsilon\"",
                            "\"margins\"", "\"solution_set\"", "\"provenance\""}) {
        CHECK(report.find(key) != std::string::npos);
    }

    // plot rows equal node count (+1 header line)
    const std::string plot = slurp(out.string() + ".plot.csv");
    const auto rows = static_cast<int>(std::count(plot.begin(), plot.end(), '\n'));
    const int nodes = 201;  // ceil(pi / (pi/200)) + 1
    CHECK(rows == nodes + 1);
    CHECK(plot.rfind("x,lower,upper,phi1,phi_tau", 0) == 0);
}

TEST_CASE("constant-M scenario fails upstream with the empty interval")
{
    const auto out = out_dir() / "const.json";
    ScenarioConfig cfg = parse_config_text(
        kirchhoff_config("SSM", out.string()));
    cfg.M = make_m_function(MFunctionSpec{Affine{1.0, 0.0}});
    std::ostringstream diag;
    CHECK(run_scenario(cfg, diag) == 3);
    CHECK(diag.str().find("EmptyInterval") != std::string::npos);

    // without t1/t2 the scan also finds no increasing pair
    cfg.t1.reset();
    cfg.t2.reset();
    std::ostringstream diag2;
    CHECK(run_scenario(cfg, diag2) == 3);
    CHECK(diag2.str().find("EmptyInterval") != std::string::npos);
}

TEST_CASE("necessity scenario demonstrates the reversed pair")
{
    const auto out = out_dir() / "necessity.json";
    ScenarioConfig cfg = parse_config_text(
        R"({"domain": {"kind": "interval", "a": -1.5707963267948966, "b": 1.5707963267948966},
            "M": {"kind": "rational_decay", "a": 1}, "mode": "NECESSITY",
            "t1": 1.0, "t2": 2.0, "output_path": ")" +
        out.string() + R"("})");
    cfg.h = kPi / 200;
    std::ostringstream diag;
    CHECK(run_scenario(cfg, diag) == 0);
    const std::string report = slurp(out);
    CHECK(report.find("\"verdict\": \"DEMONSTRATED\"") != std::string::npos);
    CHECK(report.find("\"rhs_margin\"") != std::string::npos);

    cfg.t1.reset();
    cfg.t2.reset();
    std::ostringstream diag2;
    CHECK(run_scenario(cfg, diag2) == 2);
}

TEST_CASE("report serialization is ordered and 17-significant-digit stable")
{
    Report doc;
    doc.put("pi", kPi).put("count", 42).put("flag", true).put("name", "a\"b");
    doc.put_array("xs", std::vector<double>{1.0, 0.5});
    Report sub = doc.child("inner");
    sub.put("x", 1e-9);
    const std::string text = doc.to_json();
    CHECK(text.find("\"pi\": 3.1415926535897931") != std::string::npos);
    CHECK(text.find("\"count\": 42") != std::string::npos);
    CHECK(text.find("\"flag\": true") != std::string::npos);
    CHECK(text.find("\"name\": \"a\\\"b\"") != std::string::npos);
    CHECK(text.find("[1, 0.5]") != std::string::npos);
    CHECK(text.find("\"pi\"") < text.find("\"count\""));
    CHECK(text.find("\"inner\"") != std::string::npos);
    CHECK(format_g17(0.1) == "0.10000000000000001");
}
