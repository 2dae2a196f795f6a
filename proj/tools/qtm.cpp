#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "qtm/experiment.hpp"

namespace {

enum Exit { ok = 0, config_error = 2, numerical_failure = 3, check_failure = 4 };

struct Args {
    std::string config, preset, out;
    long long seed = -1;
    int jobs = 0;
    bool check = false;
    bool list = false;
    bool dump = false;
};

int run(const std::string& sub, const Args& a)
{
    using namespace qtm;
    if (a.list) {
        for (const auto& p : preset_names(sub)) std::cout << p << '\n';
        return ok;
    }
    if (!a.config.empty() && !a.preset.empty()) throw ConfigError("give either --config or --preset, not both");
    ExperimentConfig cfg;
    if (!a.config.empty())
        cfg = load_config(a.config, sub);
    else if (!a.preset.empty())
        cfg = preset_config(sub, a.preset);
    else
        cfg = parse_config(json{{"schema", config_schema_version}}, sub);
    if (a.seed >= 0) cfg.seed = std::uint64_t(a.seed);
    if (a.jobs > 0) cfg.jobs = a.jobs;
    if (!a.out.empty()) cfg.out_dir = a.out;
    if (a.dump) {
        std::cout << cfg.to_json().dump(2) << '\n';
        return ok;
    }

    RunManifest m;
    m.config = cfg.to_json();
    m.code_version = code_version();
    m.started = utc_timestamp();
    const RunResult r = run_experiment(cfg);
    m.finished = utc_timestamp();
    m.point_status = r.point_status;
    write_artifacts(cfg, r, m);

    for (std::size_t i = 0; i < r.point_status.size(); ++i)
        if (r.point_status[i] != "ok") std::cerr << "point " << i << " failed: " << r.point_status[i] << '\n';
    for (const auto& c : r.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " (" << c.detail << ")\n";
    std::cout << "wrote " << cfg.out_dir << "/results.csv\n";
    if (!r.all_points_ok() || r.summary.contains("summary_error")) return numerical_failure;
    if (a.check && !r.all_checks_pass()) return check_failure;
    return ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"quantum thermal machine simulations"};
    app.require_subcommand(1, 1);
    Args args;
    for (const auto& sub : qtm::subcommands()) {
        CLI::App* s = app.add_subcommand(sub, "run the " + sub + " experiment");
        s->add_option("--config", args.config, "JSON experiment config")->check(CLI::ExistingFile);
        s->add_option("--preset", args.preset, "named preset");
        s->add_option("--seed", args.seed, "override the config seed");
        s->add_option("--out", args.out, "output directory");
        s->add_option("--jobs", args.jobs, "sweep points run concurrently")->check(CLI::PositiveNumber);
        s->add_flag("--check", args.check, "exit 4 when a built-in check fails");
        s->add_flag("--list-presets", args.list, "print preset names");
        s->add_flag("--print-config", args.dump, "print the resolved config and exit");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : config_error;
    }
    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        return run(sub, args);
    } catch (const qtm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return numerical_failure;
    }
}
