#include "pors/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "pors/error.hpp"
#include "pors/parallel.hpp"
#include "pors/random.hpp"

namespace pors {

using nlohmann::json;

std::string MethodSpec::label() const {
    switch (kind) {
        case Kind::kPors: return "pors:" + std::string(ssf_name(ssf));
        case Kind::kNsga2: return "nsga2";
        case Kind::kGreedy: return "greedy";
    }
    return "?";
}

MethodSpec MethodSpec::parse(const std::string& label) {
    MethodSpec m;
    if (label == "nsga2") {
        m.kind = Kind::kNsga2;
    } else if (label == "greedy") {
        m.kind = Kind::kGreedy;
    } else if (label.rfind("pors:", 0) == 0) {
        m.kind = Kind::kPors;
        m.ssf = parse_ssf(label.substr(5));
    } else {
        throw std::invalid_argument("unknown method: " + label);
    }
    return m;
}

void ExperimentPlan::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (methods.empty()) throw std::invalid_argument("plan lists no methods");
    if (k_values.empty()) throw std::invalid_argument("plan lists no k values");
    for (const auto k : k_values) {
        if (k < 1) throw std::invalid_argument("k must be >= 1");
    }
    if (max_rounds < 1) throw std::invalid_argument("max_rounds must be >= 1");
    if (stage1.n_rules < 1) throw std::invalid_argument("n_rules must be >= 1");
    if (stage1.kind == Stage1Spec::Kind::kSpectral) stage1.spectrum.validate();
    nsga.validate();
    if (greedy_beam < 1) throw std::invalid_argument("greedy beam must be >= 1");
    if (!(greedy_beta > 0.0)) throw std::invalid_argument("greedy beta must be positive");
    for (const double b : select_betas) {
        if (!(b > 0.0)) throw std::invalid_argument("selection beta must be positive");
    }
}

ExperimentPlan ExperimentPlan::from_json(const json& j) {
    ExperimentPlan p;
    try {
        const json& ds = j.at("dataset");
        p.dataset_name = ds.value("name", std::string{});
        p.data = data_source_from_json(ds);
        if (p.dataset_name.empty()) p.dataset_name = std::filesystem::path(p.data.path).stem().string();
        if (j.contains("stage1")) {
            const json& s = j["stage1"];
            const auto kind = s.value("kind", std::string("spectral"));
            if (kind == "spectral") {
                p.stage1.kind = Stage1Spec::Kind::kSpectral;
            } else if (kind == "tree") {
                p.stage1.kind = Stage1Spec::Kind::kTree;
            } else {
                throw std::invalid_argument("unknown stage1 kind: " + kind);
            }
            p.stage1.n_rules = s.value("n_rules", p.stage1.n_rules);
            p.stage1.max_len = s.value("max_len", p.stage1.max_len);
            p.stage1.beam_width = s.value("beam_width", p.stage1.beam_width);
            p.stage1.max_bins = s.value("max_bins", p.stage1.max_bins);
            if (s.contains("betas")) p.stage1.spectrum.betas = s["betas"].get<std::vector<double>>();
            p.stage1.forest.n_trees = s.value("trees", p.stage1.forest.n_trees);
            p.stage1.forest.min_leaf = s.value("min_leaf", p.stage1.forest.min_leaf);
        }
        for (const auto& m : j.at("methods")) p.methods.push_back(MethodSpec::parse(m.get<std::string>()));
        p.trials = j.value("trials", p.trials);
        p.base_seed = j.value("seed", p.base_seed);
        if (j.contains("k")) p.k_values = j["k"].get<std::vector<std::size_t>>();
        p.max_rounds = j.value("max_rounds", p.max_rounds);
        p.hvc_previous_front = j.value("hvc_previous_front", false);
        if (j.contains("nsga2")) {
            const json& n = j["nsga2"];
            p.nsga.population = n.value("population", p.nsga.population);
            p.nsga.generations = n.value("generations", p.nsga.generations);
            p.nsga.mutation_rate = n.value("mutation_rate", p.nsga.mutation_rate);
            p.nsga.crossover_rate = n.value("crossover_rate", p.nsga.crossover_rate);
        }
        if (j.contains("greedy")) {
            p.greedy_beta = j["greedy"].value("beta", p.greedy_beta);
            p.greedy_beam = j["greedy"].value("beam", p.greedy_beam);
        }
        if (j.contains("select")) {
            p.min_precisions = j["select"].value("min_precision", std::vector<double>{});
            p.select_betas = j["select"].value("beta", std::vector<double>{});
        }
        p.threads = j.value("threads", p.threads);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("bad plan: ") + e.what());
    }
    p.validate();
    return p;
}

json ExperimentPlan::to_json() const {
    json j;
    json ds = pors::to_json(data);
    ds["name"] = dataset_name;
    j["dataset"] = ds;
    json s;
    s["kind"] = stage1.kind == Stage1Spec::Kind::kSpectral ? "spectral" : "tree";
    s["n_rules"] = stage1.n_rules;
    s["max_len"] = stage1.max_len;
    s["beam_width"] = stage1.beam_width;
    s["max_bins"] = stage1.max_bins;
    s["betas"] = stage1.spectrum.betas;
    s["trees"] = stage1.forest.n_trees;
    s["min_leaf"] = stage1.forest.min_leaf;
    j["stage1"] = s;
    json ms = json::array();
    for (const auto& m : methods) ms.push_back(m.label());
    j["methods"] = ms;
    j["trials"] = trials;
    j["seed"] = base_seed;
    j["k"] = k_values;
    j["max_rounds"] = max_rounds;
    j["hvc_previous_front"] = hvc_previous_front;
    j["nsga2"] = {{"population", nsga.population},
                  {"generations", nsga.generations},
                  {"mutation_rate", nsga.mutation_rate},
                  {"crossover_rate", nsga.crossover_rate}};
    j["greedy"] = {{"beta", greedy_beta}, {"beam", greedy_beam}};
    j["select"] = {{"min_precision", min_precisions}, {"beta", select_betas}};
    j["threads"] = threads;
    return j;
}

const ResultCell* ResultTable::find(const std::string& method, std::size_t k) const {
    for (const auto& c : cells) {
        if (c.method == method && c.k == k) return &c;
    }
    return nullptr;
}

MeanStd mean_std(std::vector<double> values) {
    MeanStd out;
    if (values.empty()) return out;
    if (std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); })) {
        out.mean = out.std = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    out.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (const double v : values) ss += (v - out.mean) * (v - out.mean);
        out.std = std::sqrt(ss / (n - 1.0));
    }
    return out;
}

PoolStats pool_stats(const PoolCoverage& train) {
    std::vector<double> precision;
    std::vector<double> recall;
    for (const auto& c : train.rules) {
        const auto p = evaluate_metrics(c, train.n_positive);
        precision.push_back(p.precision);
        recall.push_back(p.recall);
    }
    PoolStats s;
    s.size = train.size();
    const auto ps = mean_std(precision);
    const auto rs = mean_std(recall);
    s.precision_mean = ps.mean;
    s.precision_std = ps.std;
    s.recall_mean = rs.mean;
    s.recall_std = rs.std;
    return s;
}

std::vector<Rule> build_stage1(const Dataset& d, const SplitView& train, const Stage1Spec& spec, std::uint64_t seed,
                               std::size_t threads) {
    const InductionData data = prepare_induction(d, train, spec.max_bins);
    if (spec.kind == Stage1Spec::Kind::kSpectral) {
        InductionConfig cfg;
        cfg.max_len = spec.max_len;
        cfg.beam_width = spec.beam_width;
        return spectral_rules(data, spec.n_rules, spec.spectrum, cfg, threads);
    }
    ForestConfig forest = spec.forest;
    forest.max_depth = spec.max_len;
    forest.seed = seed;
    return tree_rules(data, spec.n_rules, forest, threads);
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string threshold_key(const char* prefix, double v) { return std::string(prefix) + format_number(v); }

// Chooses on the validation image of the front and reports the choice on test.
void add_selections(TrialRecord& rec, const ParetoFront& front, const PoolCoverage& validation,
                    const PoolCoverage& test, const ExperimentPlan& plan) {
    if (plan.min_precisions.empty() && plan.select_betas.empty()) return;
    const ParetoFront on_validation = reevaluate_front(front, validation);
    for (const double theta : plan.min_precisions) {
        const auto idx = front_select(on_validation, {SelectCriterion::Mode::kMinPrecision, theta});
        rec.selections[threshold_key("recall@p>=", theta)] =
            idx ? make_subset(on_validation[*idx].members, test).objective.recall
                : std::numeric_limits<double>::quiet_NaN();
    }
    for (const double beta : plan.select_betas) {
        const auto idx = front_select(on_validation, {SelectCriterion::Mode::kFBeta, beta});
        if (!idx) {
            rec.selections[threshold_key("f@beta=", beta)] = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const auto p = make_subset(on_validation[*idx].members, test).objective;
        rec.selections[threshold_key("f@beta=", beta)] = f_beta(p.precision, p.recall, beta);
    }
}

struct TrialOutput {
    std::vector<TrialRecord> records;
    PoolStats pool;
};

TrialOutput run_trial(const ExperimentPlan& plan, const Dataset& d, std::size_t trial,
                      const std::optional<std::filesystem::path>& trace_dir) {
    TrialOutput out;
    const std::uint64_t seed = plan.base_seed + trial;
    SplitSpec spec;
    spec.seed = substream_seed(seed, "split");
    const Splits splits = split_dataset(d, spec);
    const SplitView train = make_view(d, splits.train, "train");
    const SplitView validation = make_view(d, splits.validation, "validation");
    const SplitView test = make_view(d, splits.test, "test");

    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<Rule> rules = build_stage1(d, train, plan.stage1, substream_seed(seed, "stage1"));
    const double stage1_seconds = seconds_since(t0);
    if (rules.empty()) throw std::runtime_error("stage 1 produced no rules");
    const PoolCoverage train_cov = cover_pool(rules, d, train);
    const PoolCoverage val_cov = cover_pool(rules, d, validation);
    const PoolCoverage test_cov = cover_pool(rules, d, test);
    out.pool = pool_stats(train_cov);
    out.pool.trial = trial;

    const auto base_record = [&](const MethodSpec& m, std::size_t k) {
        TrialRecord rec;
        rec.trial = trial;
        rec.seed = seed;
        rec.method = m.label();
        rec.k = k;
        rec.stage1_seconds = stage1_seconds;
        rec.pool_size = rules.size();
        return rec;
    };

    for (const MethodSpec& m : plan.methods) {
        if (m.kind == MethodSpec::Kind::kPors) {
            for (const std::size_t k : plan.k_values) {
                TrialRecord rec = base_record(m, k);
                PorsConfig cfg;
                cfg.ssf = SsfMethod{m.ssf, k, plan.hvc_previous_front};
                cfg.max_rounds = plan.max_rounds;
                cfg.seed = substream_seed(seed, "ssf");
                const auto t1 = std::chrono::steady_clock::now();
                const PorsTrace trace = run_pors(train_cov, &val_cov, cfg);
                rec.seconds = seconds_since(t1);
                const std::size_t best = trace.best_snapshot();
                const ParetoFront& front = trace.snapshots[best].front;
                rec.best_iteration = trace.snapshots[best].iteration;
                rec.iterations = trace.snapshots.back().iteration;
                rec.train_hv = front.hypervolume();
                rec.validation_hv = trace.snapshots[best].validation_hv.value_or(0.0);
                rec.test_hv = split_hypervolume(front, test_cov);
                rec.final_test_hv = split_hypervolume(trace.final_front(), test_cov);
                add_selections(rec, front, val_cov, test_cov, plan);
                if (trace_dir) {
                    auto name = "trace_t" + std::to_string(trial) + "_" + std::string(ssf_name(m.ssf)) + "_k" +
                                std::to_string(k) + ".json";
                    write_json_file(*trace_dir / name, trace_to_json(trace, cfg));
                }
                out.records.push_back(std::move(rec));
            }
        } else if (m.kind == MethodSpec::Kind::kNsga2) {
            TrialRecord rec = base_record(m, 0);
            NsgaConfig cfg = plan.nsga;
            cfg.seed = substream_seed(seed, "nsga2");
            const auto t1 = std::chrono::steady_clock::now();
            const NsgaResult res = nsga2_run(train_cov, cfg);
            rec.seconds = seconds_since(t1);
            rec.iterations = cfg.generations;
            rec.train_hv = res.archive.hypervolume();
            rec.validation_hv = split_hypervolume(res.archive, val_cov);
            rec.test_hv = split_hypervolume(res.archive, test_cov);
            rec.final_test_hv = rec.test_hv;
            add_selections(rec, res.archive, val_cov, test_cov, plan);
            out.records.push_back(std::move(rec));
        } else {
            TrialRecord rec = base_record(m, 0);
            const auto t1 = std::chrono::steady_clock::now();
            const GreedyResult res = greedy_fbeta(train_cov, plan.greedy_beta, plan.greedy_beam, &val_cov);
            rec.seconds = seconds_since(t1);
            rec.iterations = res.step_scores.size();
            const auto tr = res.subset.objective;
            const auto va = make_subset(res.subset.members, val_cov).objective;
            const auto te = make_subset(res.subset.members, test_cov).objective;
            rec.train_hv = tr.precision * tr.recall;
            rec.validation_hv = va.precision * va.recall;
            rec.test_hv = te.precision * te.recall;
            rec.final_test_hv = rec.test_hv;
            rec.selections[threshold_key("f@beta=", plan.greedy_beta)] = f_beta(te.precision, te.recall, plan.greedy_beta);
            out.records.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace

ResultTable run_experiment(const ExperimentPlan& plan, const Dataset& d,
                           const std::optional<std::filesystem::path>& trace_dir) {
    plan.validate();
    std::vector<TrialOutput> outputs(plan.trials);
    parallel_for(plan.trials, plan.threads, [&](std::size_t t) {
        try {
            outputs[t] = run_trial(plan, d, t, trace_dir);
        } catch (const std::exception& e) {
            throw std::runtime_error("trial " + std::to_string(t) + ": " + e.what());
        }
    });

    ResultTable table;
    for (auto& o : outputs) {
        table.pools.push_back(o.pool);
        std::move(o.records.begin(), o.records.end(), std::back_inserter(table.records));
    }
    // One cell per (method, k) in first-seen order.
    std::vector<std::pair<std::string, std::size_t>> keys;
    for (const auto& r : table.records) {
        const auto key = std::make_pair(r.method, r.k);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    for (const auto& [method, k] : keys) {
        std::vector<double> test;
        std::vector<double> final_test;
        std::vector<double> secs;
        std::map<std::string, std::vector<double>> sel;
        for (const auto& r : table.records) {
            if (r.method != method || r.k != k) continue;
            test.push_back(r.test_hv);
            final_test.push_back(r.final_test_hv);
            secs.push_back(r.seconds);
            for (const auto& [name, v] : r.selections) sel[name].push_back(v);
        }
        ResultCell cell;
        cell.dataset = plan.dataset_name;
        cell.method = method;
        cell.k = k;
        cell.trials = test.size();
        const auto ms = mean_std(test);
        cell.mean_test_hv = ms.mean;
        cell.std_test_hv = ms.std;
        cell.single_trial = test.size() == 1;
        cell.mean_final_test_hv = mean_std(final_test).mean;
        cell.mean_seconds = mean_std(secs).mean;
        for (const auto& [name, vs] : sel) cell.selection_means[name] = mean_std(vs).mean;
        table.cells.push_back(std::move(cell));
    }
    return table;
}

ResultTable run_experiment(const ExperimentPlan& plan, const std::optional<std::filesystem::path>& trace_dir) {
    const Dataset d = load_dataset(plan.data.path, plan.data.load);
    return run_experiment(plan, d, trace_dir);
}

std::string format_fixed4(double x) {
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    std::string s(buf);
    if (s == "-0.0000") s = "0.0000";
    return s;
}

namespace {

double round4(double x) { return std::isnan(x) ? x : std::round(x * 1e4) / 1e4; }

std::vector<std::string> selection_columns(const ResultTable& table) {
    std::vector<std::string> cols;
    for (const auto& c : table.cells) {
        for (const auto& [name, v] : c.selection_means) {
            if (std::find(cols.begin(), cols.end(), name) == cols.end()) cols.push_back(name);
        }
    }
    std::sort(cols.begin(), cols.end());
    return cols;
}

}  // namespace

std::string results_csv(const ResultTable& table) {
    const auto cols = selection_columns(table);
    std::ostringstream out;
    out << "dataset,method,k,trials,mean_test_hv,std_test_hv,single_trial,mean_final_test_hv,mean_seconds";
    for (const auto& c : cols) out << ',' << c;
    out << '\n';
    for (const auto& c : table.cells) {
        out << c.dataset << ',' << c.method << ',' << c.k << ',' << c.trials << ',' << format_fixed4(c.mean_test_hv)
            << ',' << format_fixed4(c.std_test_hv) << ',' << (c.single_trial ? 1 : 0) << ','
            << format_fixed4(c.mean_final_test_hv) << ',' << format_fixed4(c.mean_seconds);
        for (const auto& col : cols) {
            const auto it = c.selection_means.find(col);
            out << ',' << (it == c.selection_means.end() ? std::string() : format_fixed4(it->second));
        }
        out << '\n';
    }
    return out.str();
}

json results_json(const ResultTable& table) {
    const auto num = [](double x) { return std::isnan(x) ? json(nullptr) : json(round4(x)); };
    json cells = json::array();
    for (const auto& c : table.cells) {
        json sel = json::object();
        for (const auto& [name, v] : c.selection_means) sel[name] = num(v);
        cells.push_back({{"dataset", c.dataset},
                         {"method", c.method},
                         {"k", c.k},
                         {"trials", c.trials},
                         {"mean_test_hv", num(c.mean_test_hv)},
                         {"std_test_hv", num(c.std_test_hv)},
                         {"single_trial", c.single_trial},
                         {"mean_final_test_hv", num(c.mean_final_test_hv)},
                         {"mean_seconds", num(c.mean_seconds)},
                         {"selections", sel}});
    }
    json records = json::array();
    for (const auto& r : table.records) {
        json sel = json::object();
        for (const auto& [name, v] : r.selections) sel[name] = num(v);
        records.push_back({{"trial", r.trial},
                           {"seed", r.seed},
                           {"method", r.method},
                           {"k", r.k},
                           {"test_hv", num(r.test_hv)},
                           {"final_test_hv", num(r.final_test_hv)},
                           {"validation_hv", num(r.validation_hv)},
                           {"train_hv", num(r.train_hv)},
                           {"seconds", num(r.seconds)},
                           {"stage1_seconds", num(r.stage1_seconds)},
                           {"pool_size", r.pool_size},
                           {"iterations", r.iterations},
                           {"best_iteration", r.best_iteration},
                           {"selections", sel}});
    }
    json pools = json::array();
    for (const auto& p : table.pools) {
        pools.push_back({{"trial", p.trial},
                         {"size", p.size},
                         {"precision_mean", num(p.precision_mean)},
                         {"precision_std", num(p.precision_std)},
                         {"recall_mean", num(p.recall_mean)},
                         {"recall_std", num(p.recall_std)}});
    }
    return {{"format", "pors-results/1"}, {"cells", cells}, {"trials", records}, {"pools", pools}};
}

void export_results(const ResultTable& table, const std::string& format, const std::filesystem::path& path) {
    if (table.cells.empty()) throw std::invalid_argument("result table is empty");
    std::string body;
    if (format == "csv") {
        body = results_csv(table);
    } else if (format == "json") {
        body = results_json(table).dump(2) + "\n";
    } else {
        throw std::invalid_argument("unknown export format: " + format);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + path.string());
    out << body;
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace pors
