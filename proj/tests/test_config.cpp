#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "sgn/config.hpp"
#include "sgn/errors.hpp"
#include "sgn/runner.hpp"

using namespace sgn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("sgn_test_" + name);
    fs::remove_all(p);
    return p;
}

} // namespace

TEST_CASE("TOML subset parser")
{
    const ConfigTable t = parse_toml(R"(
# comment
top = 1
[model]
kind = "sgn-hyperbolic"   # trailing comment
order = 4
lambda = 1e3
[time]
relax = true
snapshot_times = [1.0, 2.5, 3]
)");
    CHECK(std::get<double>(t.at("top")) == 1.0);
    CHECK(std::get<std::string>(t.at("model.kind")) == "sgn-hyperbolic");
    CHECK(std::get<double>(t.at("model.lambda")) == 1000.0);
    CHECK(std::get<bool>(t.at("time.relax")));
    CHECK(std::get<std::vector<double>>(t.at("time.snapshot_times")) == std::vector<double>{1.0, 2.5, 3.0});

    CHECK_THROWS_AS(parse_toml("[model\nkind = 1"), ConfigError);
    CHECK_THROWS_AS(parse_toml("kind"), ConfigError);
    CHECK_THROWS_AS(parse_toml("x = [1, a]"), ConfigError);
    CHECK_THROWS_AS(parse_toml("x = 1\nx = 2"), ConfigError);
}

TEST_CASE("config mapping and round trip")
{
    const std::string text = R"(
[model]
kind = "sgn-original"
variant = "mild"
operator_mode = "upwind"
order = 4
[scenario]
name = "gaussian_variable"
n = 200
[time]
adaptive = false
dt = 0.01
relax = true
[av]
enabled = true
constant = 0.5
[output]
gauges = [1, 2]
[run]
seed = 42
[study]
kind = "dt-conservation"
values = [0.1, 0.05]
)";
    const RunConfig c = parse_config(text);
    CHECK(c.model == "sgn-original");
    CHECK(c.variant == "mild");
    CHECK(c.order == 4);
    CHECK(c.scenario_params.at("n") == 200.0);
    CHECK_FALSE(c.adaptive);
    CHECK(c.av.enabled);
    CHECK(c.av.c == 0.5);
    CHECK(c.seed == 42);
    REQUIRE(c.study);
    CHECK(c.study->values.size() == 2);
    validate(c);

    const std::string once = serialize(c);
    CHECK(serialize(parse_config(once)) == once);
    const std::string defaults = serialize(RunConfig{});
    CHECK(serialize(parse_config(defaults)) == defaults);

    CHECK_THROWS_AS(parse_config("[model]\ncolour = 1"), ConfigError);
    CHECK_THROWS_AS(parse_config("[weather]\nrain = 1"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\norder = 2.5"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nkind = 3"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/run.toml"), ConfigError);
}

TEST_CASE("validation")
{
    auto bad = [](auto mutate) {
        RunConfig c;
        mutate(c);
        CHECK_THROWS_AS(validate(c), ConfigError);
    };
    validate(RunConfig{});
    bad([](RunConfig& c) { c.model = "kdv"; });
    bad([](RunConfig& c) { c.model = "swe", c.variant = "mild"; });
    bad([](RunConfig& c) { c.variant = "variable"; });
    bad([](RunConfig& c) { c.lambda_set = true; });
    bad([](RunConfig& c) { c.order = 3; });
    bad([](RunConfig& c) { c.operator_mode = "upwind", c.order = 7; });
    bad([](RunConfig& c) { c.adaptive = false; });
    bad([](RunConfig& c) { c.tableau = "rk4"; });
    bad([](RunConfig& c) { c.scenario = "manufactured"; });
    bad([](RunConfig& c) { c.study = StudyConfig{"random-walk", {1.0}, {}}; });
    bad([](RunConfig& c) { c.abs_tol = 0.0; });

    RunConfig c;
    c.scenario = "tsunami";
    try {
        validate(c);
        FAIL("expected ConfigError");
    }
    catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("riemann") != std::string::npos);
        CHECK(msg.find("soliton_fission") != std::string::npos);
    }

    RunConfig h;
    h.model = "sgn-hyperbolic";
    h.lambda_set = true;
    validate(h);
    CHECK(resolved_tableau(h) == "bs3");
    CHECK(resolved_tableau(RunConfig{}) == "tsit5");
}

TEST_CASE("lake-at-rest run reports a steady state")
{
    const fs::path dir = scratch("lake");
    RunConfig c;
    c.model = "sgn-original";
    c.variant = "full";
    c.operator_mode = "upwind";
    c.scenario = "lake_at_rest";
    c.scenario_params = {{"n", 200.0}, {"t_end", 1.0}};
    c.output_dir = dir.string();
    c.snapshot_times = {0.5};
    c.gauges = {0.0, 10.0};
    const RunResult r = run(c);
    CHECK(r.initial_rhs_norm <= 1e-13);
    CHECK(std::abs(r.mass_drift()) <= 1e-12);
    CHECK(std::abs(r.relative_energy_drift()) <= 1e-14);
    CHECK(r.t_final == 1.0);
    CHECK(fs::exists(dir / "invariants.csv"));
    CHECK(fs::exists(dir / "snapshot_final.csv"));
    CHECK(fs::exists(dir / "gauges.csv"));
    REQUIRE(r.snapshots.size() == 1);
    CHECK(r.snapshots[0].t == 0.5);
    CHECK(fs::exists(dir / "snapshot_t0.5.csv"));
    const std::string line = summary_line(c, r);
    CHECK(line.find("rhs_norm0=") != std::string::npos);
    CHECK(line.find("wall=") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("soliton run with relaxation conserves energy")
{
    RunConfig c;
    c.scenario_params = {{"n", 128.0}, {"t_end", 5.0}};
    c.order = 4;
    c.relax = true;
    c.write_files = false;
    const RunResult r = run(c);
    CHECK(std::abs(r.relative_energy_drift()) <= 1e-13);
    REQUIRE(r.error_h);
    CHECK(*r.error_h < 1e-2);
}

TEST_CASE("identical runs produce identical files")
{
    RunConfig c;
    c.model = "sgn-hyperbolic";
    c.variant = "variable";
    c.scenario = "gaussian_variable";
    c.scenario_params = {{"n", 200.0}, {"t_end", 2.0}};
    c.av.enabled = true;
    c.seed = 7;
    const fs::path a = scratch("det_a"), b = scratch("det_b");
    c.output_dir = a.string();
    run(c);
    c.output_dir = b.string();
    run(c);
    int compared = 0;
    for (const auto& entry : fs::directory_iterator(a)) {
        const fs::path other = b / entry.path().filename();
        REQUIRE(fs::exists(other));
        CHECK(slurp(entry.path()) == slurp(other));
        ++compared;
    }
    CHECK(compared >= 2);
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("output directory override")
{
    RunConfig c;
    c.output_dir = "somewhere";
    ::setenv("SGN_OUTPUT_DIR", "/tmp/elsewhere", 1);
    CHECK(output_directory(c) == "/tmp/elsewhere");
    ::unsetenv("SGN_OUTPUT_DIR");
    CHECK(output_directory(c) == "somewhere");
}

TEST_CASE("runs fail cleanly")
{
    RunConfig c;
    c.scenario = "tsunami";
    CHECK_THROWS_AS(run(c), ConfigError);

    RunConfig blow;
    blow.model = "swe";
    blow.scenario = "riemann";
    blow.scenario_params = {{"n", 400.0}, {"t_end", 5.0}, {"h_right", 0.05}, {"alpha", 0.01}};
    blow.adaptive = false;
    blow.dt = 5.0;
    blow.write_files = false;
    CHECK_THROWS(run(blow));
}

TEST_CASE("studies record every row")
{
    const fs::path dir = scratch("study");
    RunConfig c;
    c.scenario_params = {{"t_end", 1.0}};
    c.output_dir = dir.string();
    c.study = StudyConfig{"grid-convergence", {32.0, 64.0, 2.0}, {2.0}};
    const StudyResult s = study(c);
    REQUIRE(s.rows.size() == 3);
    CHECK(s.rows[0].error.empty());
    CHECK(s.rows[1].error.empty());
    CHECK_FALSE(s.rows[2].error.empty());
    CHECK(fs::exists(s.path));
    const std::string csv = slurp(s.path);
    CHECK(csv.find("eoc_h") != std::string::npos);
    CHECK(csv.find("status") != std::string::npos);
    fs::remove_all(dir);
}
