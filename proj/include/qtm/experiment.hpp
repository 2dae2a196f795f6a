#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qtm {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int config_schema_version = 1;

struct SweepAxis {
    std::string name;
    json values;  // array; numeric axes may be given as {"log_range": [lo, hi, n]} or {"range": [lo, hi, n]}
};

struct ExperimentConfig {
    std::string subcommand;
    std::string preset;  // empty for hand-written configs
    json params;         // complete parameter table, defaults filled in
    std::vector<SweepAxis> sweep;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int jobs = 1;

    std::size_t n_points() const;
    // parameter table of sweep point `index` (row-major over the axes, last axis fastest)
    json point_params(std::size_t index) const;
    json to_json() const;
};

const std::vector<std::string>& subcommands();
json default_params(const std::string& subcommand);

// Throws ConfigError on unknown keys, type mismatches, unknown subcommands or empty sweeps.
ExperimentConfig parse_config(const json& doc, const std::string& expected_subcommand = "");
ExperimentConfig load_config(const std::string& path, const std::string& expected_subcommand = "");

std::vector<std::string> preset_names(const std::string& subcommand);
ExperimentConfig preset_config(const std::string& subcommand, const std::string& name);

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    std::vector<std::string> columns;
    std::vector<std::vector<json>> rows;  // numbers, strings or booleans
    std::vector<std::string> point_status;  // "ok" or the failure message, one per sweep point
    json summary = json::object();
    std::vector<Check> checks;

    bool all_points_ok() const;
    bool all_checks_pass() const;
};

RunResult run_experiment(const ExperimentConfig& cfg);

std::string to_csv(const RunResult& r);
// header followed by lexicographically sorted rows
std::string normalized_csv(const std::string& csv);

struct RunManifest {
    json config;
    std::string code_version;
    std::string started, finished;  // UTC ISO-8601
    std::vector<std::string> point_status;
};

// writes results.csv, summary.json and manifest.json under cfg.out_dir
void write_artifacts(const ExperimentConfig& cfg, const RunResult& r, const RunManifest& m);

std::string utc_timestamp();
std::string code_version();

}  // namespace qtm
