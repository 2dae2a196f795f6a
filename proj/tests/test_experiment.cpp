#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "qtm/experiment.hpp"

using namespace qtm;

namespace {

json doc(json params = json::object(), json sweep = json::array())
{
    if (params.is_null()) params = json::object();
    return {{"schema", 1}, {"subcommand", "qa-otto"}, {"params", params}, {"sweep", sweep}};
}

}  // namespace

TEST_CASE("every subcommand has defaults and buildable presets")
{
    const auto& subs = subcommands();
    CHECK(subs.size() == 9);
    for (const auto& s : subs) {
        CHECK(default_params(s).is_object());
        for (const auto& p : preset_names(s)) {
            const ExperimentConfig cfg = preset_config(s, p);
            CHECK(cfg.subcommand == s);
            CHECK(cfg.n_points() >= 1);
        }
    }
}

TEST_CASE("config validation rejects malformed documents")
{
    CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"subcommand", "qa-otto"}, {"bogus", 1}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"subcommand", "qa-otto"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"schema", 2}, {"subcommand", "qa-otto"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(doc({{"n_particles", "two"}})), ConfigError);
    CHECK_THROWS_AS(parse_config(doc({{"n_particles", 2.5}})), ConfigError);
    CHECK_THROWS_AS(parse_config(doc({{"no_such", 1}})), ConfigError);
    CHECK_THROWS_AS(parse_config(doc({}, json::array({{{"name", "tau_ramp"}, {"values", json::array()}}}))), ConfigError);
    CHECK_THROWS_AS(parse_config(doc({}, json::array({{{"name", "nope"}, {"values", {1}}}}))), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"subcommand", "warp-drive"}}), ConfigError);
    CHECK_THROWS_AS(parse_config(json{{"schema", 1}, {"subcommand", "qa-otto"}}, "gaah"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
    CHECK_THROWS_AS(preset_config("qa-otto", "missing"), ConfigError);
}

TEST_CASE("sweep expansion and point ordering")
{
    const ExperimentConfig cfg = parse_config(doc({}, json::array({
        {{"name", "statistics"}, {"values", {"fermion", "boson"}}},
        {{"name", "tau_ramp"}, {"values", {{"log_range", {0.1, 10.0, 3}}}}},
    })));
    CHECK(cfg.n_points() == 6);
    CHECK(cfg.point_params(0)["statistics"] == "fermion");
    CHECK(cfg.point_params(1)["tau_ramp"].get<double>() == doctest::Approx(1.0));
    CHECK(cfg.point_params(3)["statistics"] == "boson");
    CHECK(cfg.point_params(5)["tau_ramp"].get<double>() == doctest::Approx(10.0));

    const ExperimentConfig r = parse_config(
        doc({}, json::array({{{"name", "n_particles"}, {"values", {{"range", {1, 7, 4}}}}}})));
    CHECK(r.point_params(2)["n_particles"] == 5);
    CHECK(r.point_params(2)["n_particles"].is_number_integer());

    // round trip through to_json
    const ExperimentConfig again = parse_config(cfg.to_json());
    CHECK(again.to_json() == cfg.to_json());
}

TEST_CASE("runs are deterministic across job counts")
{
    ExperimentConfig cfg = preset_config("mbl-engine", "closed-form");
    cfg.sweep[0].values = {1e4, 2e4, 4e4};
    cfg.seed = 42;
    cfg.jobs = 1;
    const std::string a = normalized_csv(to_csv(run_experiment(cfg)));
    cfg.jobs = 4;
    const std::string b = normalized_csv(to_csv(run_experiment(cfg)));
    CHECK(a == b);
    cfg.seed = 43;
    CHECK(normalized_csv(to_csv(run_experiment(cfg))) != a);
}

TEST_CASE("failing points are recorded without aborting the sweep")
{
    // tau_ramp < 0 fails validation for one point only
    ExperimentConfig cfg = parse_config(doc({{"advantage", false}},
                                            json::array({{{"name", "tau_ramp"}, {"values", {1.0, -1.0, 2.0}}}})));
    const RunResult r = run_experiment(cfg);
    CHECK(r.point_status[0] == "ok");
    CHECK(r.point_status[1] != "ok");
    CHECK(r.rows.size() == 2);
    CHECK_FALSE(r.all_points_ok());
    CHECK(r.checks.empty());
}

TEST_CASE("artifacts and the fit runner")
{
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "qtm_test_artifacts";
    fs::remove_all(dir);
    ExperimentConfig cfg = parse_config(doc({{"advantage", false}},
                                            json::array({{{"name", "tau_ramp"}, {"values", {0.5, 1.0}}}})));
    cfg.out_dir = dir.string();
    const RunResult r = run_experiment(cfg);
    RunManifest m{cfg.to_json(), code_version(), utc_timestamp(), utc_timestamp(), r.point_status};
    write_artifacts(cfg, r, m);
    for (const char* f : {"results.csv", "summary.json", "manifest.json"}) CHECK(fs::exists(dir / f));
    std::ifstream in(dir / "manifest.json");
    const json man = json::parse(in);
    CHECK(man["points"].size() == 2);
    CHECK(man["config"]["subcommand"] == "qa-otto");
    CHECK(man["started"].get<std::string>().size() == 20);

    {
        std::ofstream csv(dir / "pl.csv");
        csv << "x,y\n";
        for (int i = 0; i < 10; ++i) csv << std::pow(10.0, 0.25 * i) << ',' << 5.0 * std::pow(10.0, -0.5 * 0.25 * i) << '\n';
    }
    const ExperimentConfig fc = parse_config(json{{"schema", 1},
                                                  {"subcommand", "fit"},
                                                  {"params", {{"input", (dir / "pl.csv").string()}}}});
    const RunResult fr = run_experiment(fc);
    REQUIRE(fr.all_points_ok());
    CHECK(fr.rows[0][1].get<double>() == doctest::Approx(-0.5).epsilon(1e-6));
    fs::remove_all(dir);
}

TEST_CASE("csv formatting")
{
    RunResult r;
    r.columns = {"a", "b", "c"};
    r.rows = {{json(1), json(0.5), json("x")}, {json(true), json(nullptr), json(-2)}};
    CHECK(to_csv(r) == "a,b,c\n1,0.5,x\n1,nan,-2\n");
    CHECK(normalized_csv("h\nb\na\n") == "h\na\nb\n");
}
