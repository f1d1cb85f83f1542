#include "pors/serialization.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "pors/error.hpp"

namespace pors {

using nlohmann::json;

json to_json(const DataSource& src) {
    json j;
    j["path"] = src.path;
    j["label"] = src.load.label_column;
    j["delimiter"] = std::string(1, src.load.delimiter);
    j["positive_label"] = src.load.positive_label ? json(*src.load.positive_label) : json(nullptr);
    j["categorical"] = src.load.categorical_columns;
    j["drop"] = src.load.drop_columns;
    j["split_seed"] = src.split_seed;
    return j;
}

DataSource data_source_from_json(const json& j) {
    try {
        DataSource src;
        src.path = j.at("path").get<std::string>();
        src.load.label_column = j.at("label").get<std::string>();
        const auto delim = j.value("delimiter", std::string(","));
        if (delim.size() != 1) throw DataError("delimiter must be a single character");
        src.load.delimiter = delim[0];
        if (j.contains("positive_label") && !j["positive_label"].is_null()) {
            src.load.positive_label = j["positive_label"].get<std::string>();
        }
        src.load.categorical_columns = j.value("categorical", std::vector<std::string>{});
        src.load.drop_columns = j.value("drop", std::vector<std::string>{});
        src.split_seed = j.value("split_seed", std::uint64_t{0});
        return src;
    } catch (const json::exception& e) {
        throw DataError(std::string("bad data source record: ") + e.what());
    }
}

json rules_to_json(const std::vector<Rule>& rules, const Dataset& d) {
    json out = json::array();
    for (const Rule& r : rules) {
        json conds = json::array();
        for (const Condition& c : r.conditions) {
            const Column& col = d.feature(c.feature);
            json cj;
            cj["feature"] = col.name;
            cj["op"] = std::string(op_symbol(c.op));
            if (c.op == Op::kEqual) {
                cj["value"] = col.categories.at(static_cast<std::size_t>(c.category));
            } else {
                cj["value"] = c.threshold;
            }
            conds.push_back(std::move(cj));
        }
        out.push_back({{"id", r.id}, {"provenance", r.provenance}, {"conditions", std::move(conds)},
                       {"text", rule_text(r, d)}});
    }
    return out;
}

std::vector<Rule> rules_from_json(const json& j, const Dataset& d) {
    std::vector<Rule> rules;
    try {
        for (const auto& rj : j) {
            Rule r;
            r.id = rj.at("id").get<RuleIndex>();
            r.provenance = rj.value("provenance", std::string{});
            for (const auto& cj : rj.at("conditions")) {
                const auto name = cj.at("feature").get<std::string>();
                const auto f = d.feature_index(name);
                if (!f) throw DataError("rule " + std::to_string(r.id) + " uses unknown feature " + name);
                const Column& col = d.feature(*f);
                const auto op = cj.at("op").get<std::string>();
                Condition c;
                c.feature = static_cast<std::uint32_t>(*f);
                if (op == "=") {
                    if (col.kind != ColumnKind::kCategorical) throw DataError("'=' on numeric feature " + name);
                    const auto value = cj.at("value").get<std::string>();
                    const auto it = std::find(col.categories.begin(), col.categories.end(), value);
                    if (it == col.categories.end()) {
                        throw DataError("unknown category '" + value + "' of feature " + name);
                    }
                    c.op = Op::kEqual;
                    c.category = static_cast<std::int32_t>(it - col.categories.begin());
                } else if (op == "<=" || op == ">") {
                    if (col.kind != ColumnKind::kNumeric) throw DataError("'" + op + "' on categorical feature " + name);
                    c.op = op == "<=" ? Op::kLessEq : Op::kGreater;
                    c.threshold = cj.at("value").get<double>();
                } else {
                    throw DataError("unknown operator '" + op + "'");
                }
                r.conditions.push_back(c);
            }
            if (r.conditions.empty()) throw DataError("rule " + std::to_string(r.id) + " has no conditions");
            r.conditions = canonical_conditions(std::move(r.conditions));
            rules.push_back(std::move(r));
        }
    } catch (const json::exception& e) {
        throw DataError(std::string("bad rule record: ") + e.what());
    }
    for (std::size_t i = 0; i < rules.size(); ++i) {
        if (rules[i].id != i) throw DataError("rule ids must be 0..n-1 in order");
    }
    return rules;
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw DataError("malformed JSON in " + path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << j.dump(2) << '\n';
    if (!out) throw DataError("write failed: " + path.string());
}

void write_rule_pool(const std::filesystem::path& path, const DataSource& src, const std::vector<Rule>& rules,
                     const Dataset& d) {
    json j;
    j["format"] = "pors-rules/1";
    j["source"] = to_json(src);
    j["rules"] = rules_to_json(rules, d);
    write_json_file(path, j);
}

namespace {

json entry_to_json(const RuleSubset& s) {
    json e;
    e["precision"] = s.objective.precision;
    e["recall"] = s.objective.recall;
    e["rules"] = s.members;
    e["size"] = s.members.size();
    if (s.objective.counts) {
        e["covered"] = s.objective.counts->covered;
        e["covered_positive"] = s.objective.counts->covered_positive;
        e["positives"] = s.objective.counts->positives;
    }
    return e;
}

json entries_to_json(const ParetoFront& front) {
    json out = json::array();
    for (const auto& s : front.entries()) out.push_back(entry_to_json(s));
    return out;
}

}  // namespace

json front_to_json(const ParetoFront& front, const std::string& split) {
    json j;
    j["format"] = "pors-front/1";
    j["split"] = split;
    j["hypervolume"] = front.hypervolume();
    j["entries"] = entries_to_json(front);
    return j;
}

ParetoFront front_from_json(const json& j) {
    try {
        std::vector<RuleSubset> entries;
        for (const auto& e : j.at("entries")) {
            RuleSubset s;
            s.members = e.at("rules").get<std::vector<RuleIndex>>();
            std::sort(s.members.begin(), s.members.end());
            if (e.contains("covered")) {
                s.objective = ObjectivePoint::from_counts(e.at("covered").get<std::uint64_t>(),
                                                          e.at("covered_positive").get<std::uint64_t>(),
                                                          e.at("positives").get<std::uint64_t>());
            } else {
                s.objective.precision = e.at("precision").get<double>();
                s.objective.recall = e.at("recall").get<double>();
            }
            entries.push_back(std::move(s));
        }
        return make_pareto_front(std::move(entries));
    } catch (const json::exception& e) {
        throw DataError(std::string("bad front record: ") + e.what());
    }
}

json trace_to_json(const PorsTrace& trace, const PorsConfig& cfg, bool with_timing) {
    json j;
    j["format"] = "pors-trace/1";
    j["ssf"] = std::string(ssf_name(cfg.ssf.kind));
    j["k"] = cfg.ssf.k;
    j["max_rounds"] = cfg.max_rounds;
    j["seed"] = cfg.seed;
    j["converged_at"] = trace.converged_at ? json(*trace.converged_at) : json(nullptr);
    j["best_snapshot"] = trace.best_snapshot();
    json snaps = json::array();
    for (const auto& s : trace.snapshots) {
        json sj;
        sj["iteration"] = s.iteration;
        sj["train_hv"] = s.train_hv;
        sj["validation_hv"] = s.validation_hv ? json(*s.validation_hv) : json(nullptr);
        sj["candidates"] = s.candidates;
        sj["selected"] = s.selected;
        if (with_timing) sj["elapsed_seconds"] = s.elapsed_seconds;
        sj["front"] = entries_to_json(s.front);
        snaps.push_back(std::move(sj));
    }
    j["snapshots"] = std::move(snaps);
    return j;
}

}  // namespace pors
