#include "qtm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "runners.hpp"

#ifndef QTM_VERSION
#define QTM_VERSION "unknown"
#endif

namespace qtm {

using detail::registry;

namespace {

const detail::Runner& runner(const std::string& sub)
{
    const auto it = registry().find(sub);
    if (it == registry().end()) throw ConfigError("unknown subcommand '" + sub + "'");
    return it->second;
}

bool same_kind(const json& a, const json& b)
{
    if (a.is_number() && b.is_number()) return !(a.is_number_integer() && b.is_number_float());
    if (a.is_array() && b.is_array()) return true;
    return a.type() == b.type();
}

json expand_axis(const std::string& name, const json& spec)
{
    if (spec.is_array()) {
        if (spec.empty()) throw ConfigError("sweep axis '" + name + "' is empty");
        return spec;
    }
    if (!spec.is_object() || spec.size() != 1) throw ConfigError("sweep axis '" + name + "': expected values or one range");
    const bool log = spec.contains("log_range");
    if (!log && !spec.contains("range")) throw ConfigError("sweep axis '" + name + "': unknown range kind");
    const json& r = log ? spec["log_range"] : spec["range"];
    if (!r.is_array() || r.size() != 3 || !r[0].is_number() || !r[1].is_number() || !r[2].is_number_integer())
        throw ConfigError("sweep axis '" + name + "': range must be [lo, hi, n]");
    const double lo = r[0], hi = r[1];
    const int n = r[2];
    if (n < 1) throw ConfigError("sweep axis '" + name + "': n must be >= 1");
    if (log && !(lo > 0.0 && hi > 0.0)) throw ConfigError("sweep axis '" + name + "': log_range needs positive ends");
    json out = json::array();
    const bool integral = !log && r[0].is_number_integer() && r[1].is_number_integer() &&
                          (n == 1 || (r[1].get<long long>() - r[0].get<long long>()) % (n - 1) == 0);
    if (integral) {
        const long long a = r[0], step = n == 1 ? 0 : (r[1].get<long long>() - a) / (n - 1);
        for (int i = 0; i < n; ++i) out.push_back(a + step * i);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        const double f = n == 1 ? 0.0 : double(i) / (n - 1);
        out.push_back(log ? std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo))) : lo + f * (hi - lo));
    }
    return out;
}

std::string cell(const json& v)
{
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v.get<double>());
        return buf;
    }
    if (v.is_null()) return "nan";
    return v.dump();
}

}  // namespace

std::size_t ExperimentConfig::n_points() const
{
    std::size_t n = 1;
    for (const auto& a : sweep) n *= a.values.size();
    return n;
}

json ExperimentConfig::point_params(std::size_t index) const
{
    json p = params;
    for (auto it = sweep.rbegin(); it != sweep.rend(); ++it) {
        const std::size_t m = it->values.size();
        p[it->name] = it->values[index % m];
        index /= m;
    }
    return p;
}

json ExperimentConfig::to_json() const
{
    json sw = json::array();
    for (const auto& a : sweep) sw.push_back({{"name", a.name}, {"values", a.values}});
    json doc = {{"schema", config_schema_version}, {"subcommand", subcommand}, {"seed", seed}, {"jobs", jobs},
                {"out", out_dir}, {"params", params}, {"sweep", sw}};
    if (!preset.empty()) doc["preset"] = preset;
    return doc;
}

const std::vector<std::string>& subcommands()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, r] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

json default_params(const std::string& sub) { return runner(sub).defaults; }

ExperimentConfig parse_config(const json& doc, const std::string& expected)
{
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    static const std::vector<std::string> top = {"schema", "subcommand", "preset", "seed", "jobs", "out", "params", "sweep"};
    for (const auto& [k, v] : doc.items())
        if (std::find(top.begin(), top.end(), k) == top.end()) throw ConfigError("unknown key '" + k + "'");
    if (!doc.contains("schema") || !doc["schema"].is_number_integer())
        throw ConfigError("missing integer 'schema'");
    if (doc["schema"].get<int>() != config_schema_version)
        throw ConfigError("unsupported schema " + doc["schema"].dump());

    ExperimentConfig cfg;
    if (doc.contains("subcommand")) {
        if (!doc["subcommand"].is_string()) throw ConfigError("'subcommand' must be a string");
        cfg.subcommand = doc["subcommand"];
    } else {
        cfg.subcommand = expected;
    }
    if (cfg.subcommand.empty()) throw ConfigError("no subcommand given");
    if (!expected.empty() && cfg.subcommand != expected)
        throw ConfigError("config is for '" + cfg.subcommand + "', not '" + expected + "'");
    const detail::Runner& r = runner(cfg.subcommand);

    // a preset supplies the base; explicit keys override it
    json base_params = r.defaults;
    json base_sweep = json::array();
    if (doc.contains("preset")) {
        if (!doc["preset"].is_string()) throw ConfigError("'preset' must be a string");
        cfg.preset = doc["preset"];
        const ExperimentConfig p = preset_config(cfg.subcommand, cfg.preset);
        base_params = p.params;
        for (const auto& a : p.sweep) base_sweep.push_back({{"name", a.name}, {"values", a.values}});
        cfg.seed = p.seed;
    }
    cfg.params = base_params;
    if (doc.contains("params")) {
        if (!doc["params"].is_object()) throw ConfigError("'params' must be an object");
        for (const auto& [k, v] : doc["params"].items()) {
            if (!r.defaults.contains(k)) throw ConfigError("unknown parameter '" + k + "' for " + cfg.subcommand);
            if (!same_kind(r.defaults[k], v)) throw ConfigError("parameter '" + k + "' has the wrong type");
            cfg.params[k] = v;
        }
    }
    const json& sweep = doc.contains("sweep") ? doc["sweep"] : base_sweep;
    if (!sweep.is_array()) throw ConfigError("'sweep' must be an array of axes");
    for (const json& ax : sweep) {
        if (!ax.is_object() || !ax.contains("name") || !ax["name"].is_string())
            throw ConfigError("sweep axis needs a string 'name'");
        for (const auto& [k, v] : ax.items())
            if (k != "name" && k != "values") throw ConfigError("unknown sweep key '" + k + "'");
        const std::string name = ax["name"];
        if (!r.defaults.contains(name)) throw ConfigError("sweep over unknown parameter '" + name + "'");
        if (!ax.contains("values")) throw ConfigError("sweep axis '" + name + "' has no values");
        SweepAxis a{name, expand_axis(name, ax["values"])};
        for (const json& v : a.values)
            if (!same_kind(r.defaults[name], v) && !(r.defaults[name].is_number() && v.is_number()))
                throw ConfigError("sweep value of '" + name + "' has the wrong type");
        cfg.sweep.push_back(std::move(a));
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ConfigError("'seed' must be a nonnegative integer");
        cfg.seed = doc["seed"];
    }
    if (doc.contains("jobs")) {
        if (!doc["jobs"].is_number_integer() || doc["jobs"].get<int>() < 1) throw ConfigError("'jobs' must be >= 1");
        cfg.jobs = doc["jobs"];
    }
    if (doc.contains("out")) {
        if (!doc["out"].is_string()) throw ConfigError("'out' must be a string");
        cfg.out_dir = doc["out"];
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::string& expected)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    return parse_config(doc, expected);
}

std::vector<std::string> preset_names(const std::string& sub)
{
    std::vector<std::string> out;
    for (const auto& [k, f] : runner(sub).presets) out.push_back(k);
    return out;
}

ExperimentConfig preset_config(const std::string& sub, const std::string& name)
{
    const detail::Runner& r = runner(sub);
    const auto it = r.presets.find(name);
    if (it == r.presets.end()) throw ConfigError("unknown preset '" + name + "' for " + sub);
    json doc = it->second();
    doc["schema"] = config_schema_version;
    doc["subcommand"] = sub;
    doc.erase("preset");
    ExperimentConfig cfg = parse_config(doc, sub);
    cfg.preset = name;
    return cfg;
}

bool RunResult::all_points_ok() const
{
    return std::all_of(point_status.begin(), point_status.end(), [](const std::string& s) { return s == "ok"; });
}

bool RunResult::all_checks_pass() const
{
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

RunResult run_experiment(const ExperimentConfig& cfg)
{
    const detail::Runner& r = runner(cfg.subcommand);
    const std::size_t n = cfg.n_points();
    std::vector<std::vector<detail::Row>> per_point(n);
    RunResult res;
    res.columns = r.columns(cfg.params);
    res.columns.insert(res.columns.begin(), "point");
    res.point_status.assign(n, "ok");
    const Exec inner = cfg.jobs > 1 ? Exec::serial : Exec::parallel;
#pragma omp parallel for num_threads(cfg.jobs) schedule(dynamic)
    for (std::size_t i = 0; i < n; ++i) {
        try {
            per_point[i] = r.point(cfg.point_params(i), detail::PointContext{cfg.seed, i, inner});
        } catch (const std::exception& e) {
            res.point_status[i] = e.what();
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (auto& row : per_point[i]) {
            row.insert(row.begin(), json(i));
            res.rows.push_back(std::move(row));
        }
    if (res.all_points_ok() && r.summarize) {
        try {
            r.summarize(cfg, res);
        } catch (const std::exception& e) {
            res.checks.push_back({"summary", false, e.what()});
            res.summary["summary_error"] = e.what();
        }
    }
    return res;
}

std::string to_csv(const RunResult& r)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < r.columns.size(); ++i) os << (i ? "," : "") << r.columns[i];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << cell(row[i]);
        os << '\n';
    }
    return os.str();
}

std::string normalized_csv(const std::string& csv)
{
    std::istringstream is(csv);
    std::string header, line;
    std::getline(is, header);
    std::vector<std::string> rows;
    while (std::getline(is, line))
        if (!line.empty()) rows.push_back(line);
    std::sort(rows.begin(), rows.end());
    std::string out = header + "\n";
    for (const auto& l : rows) out += l + "\n";
    return out;
}

std::string utc_timestamp()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string code_version() { return QTM_VERSION; }

void write_artifacts(const ExperimentConfig& cfg, const RunResult& r, const RunManifest& m)
{
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const fs::path dir(cfg.out_dir);
    {
        std::ofstream(dir / "results.csv") << to_csv(r);
    }
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    json summary = r.summary;
    summary["seed"] = cfg.seed;
    summary["checks"] = checks;
    std::ofstream(dir / "summary.json") << summary.dump(2) << '\n';
    json points = json::array();
    for (std::size_t i = 0; i < m.point_status.size(); ++i)
        points.push_back({{"index", i}, {"params", cfg.point_params(i)}, {"status", m.point_status[i]}});
    const json manifest = {{"config", m.config},         {"code_version", m.code_version}, {"started", m.started},
                           {"finished", m.finished},     {"seed", cfg.seed},               {"points", points}};
    std::ofstream(dir / "manifest.json") << manifest.dump(2) << '\n';
}

namespace detail {

std::size_t column(const RunResult& r, const std::string& name)
{
    const auto it = std::find(r.columns.begin(), r.columns.end(), name);
    if (it == r.columns.end()) throw std::logic_error("no column " + name);
    return std::size_t(it - r.columns.begin());
}

double num(const Row& row, std::size_t col)
{
    const json& v = row.at(col);
    if (v.is_null()) return std::nan("");
    return v.get<double>();
}

void add_check(RunResult& r, std::string name, bool pass, std::string detail)
{
    r.checks.push_back({std::move(name), pass, std::move(detail)});
}

}  // namespace detail

}  // namespace qtm
