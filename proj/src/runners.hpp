#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qtm/exec.hpp"
#include "qtm/experiment.hpp"

namespace qtm::detail {

using Row = std::vector<json>;

struct PointContext {
    std::uint64_t seed = 1;
    std::size_t index = 0;
    Exec inner = Exec::parallel;  // kernel-level parallelism inside one point
};

struct Runner {
    json defaults;
    std::function<std::vector<std::string>(const json& params)> columns;
    std::function<std::vector<Row>(const json& params, const PointContext& ctx)> point;
    std::function<void(const ExperimentConfig& cfg, RunResult& r)> summarize;
    std::map<std::string, std::function<json()>> presets;  // config documents
};

const std::map<std::string, Runner>& registry();

// column lookup for summaries
std::size_t column(const RunResult& r, const std::string& name);
double num(const Row& row, std::size_t col);

void add_check(RunResult& r, std::string name, bool pass, std::string detail);

}  // namespace qtm::detail
