#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pors/dataset.hpp"
#include "pors/framework.hpp"
#include "pors/rules.hpp"

namespace pors {

/// Where a rule pool's data came from, so later stages can rebuild splits.
struct DataSource {
    std::string path;
    LoadOptions load;
    std::uint64_t split_seed = 0;
};

nlohmann::json to_json(const DataSource& src);
DataSource data_source_from_json(const nlohmann::json& j);

struct RulePoolFile {
    DataSource source;
    std::vector<Rule> rules;
};

/// One record per rule: id, provenance, conditions by feature name, text.
nlohmann::json rules_to_json(const std::vector<Rule>& rules, const Dataset& d);
/// Resolves feature and category names against `d`. Throws DataError on
/// unknown features, categories or malformed records. Coverage is left empty.
std::vector<Rule> rules_from_json(const nlohmann::json& j, const Dataset& d);

void write_rule_pool(const std::filesystem::path& path, const DataSource& src, const std::vector<Rule>& rules,
                     const Dataset& d);
nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

/// Ordered records (precision, recall, rule ids, size, counts) plus HV and split tag.
nlohmann::json front_to_json(const ParetoFront& front, const std::string& split);
/// Rebuilds a front (objectives only; coverage empty).
ParetoFront front_from_json(const nlohmann::json& j);

nlohmann::json trace_to_json(const PorsTrace& trace, const PorsConfig& cfg, bool with_timing = false);

}  // namespace pors
