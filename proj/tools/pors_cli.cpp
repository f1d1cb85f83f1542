// pors: command line front end for rule pool generation, front expansion,
// baselines, selection and experiments.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pors/baselines.hpp"
#include "pors/dataset.hpp"
#include "pors/error.hpp"
#include "pors/experiment.hpp"
#include "pors/framework.hpp"
#include "pors/induction.hpp"
#include "pors/random.hpp"
#include "pors/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::size_t threads = 1;
    bool verbose = false;
};

struct DataFlags {
    std::string path;
    std::string label;
    std::string delimiter = ",";
    std::string positive;
    std::vector<std::string> drop;
    std::vector<std::string> categorical;

    void add(CLI::App* app) {
        app->add_option("--data", path, "Delimited text file with a header row")->required()->envname("PORS_DATA");
        app->add_option("--label", label, "Label column")->required();
        app->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
        app->add_option("--positive", positive, "Label value mapped to 1");
        app->add_option("--drop", drop, "Columns to ignore")->delimiter(',');
        app->add_option("--categorical", categorical, "Columns forced categorical")->delimiter(',');
    }

    [[nodiscard]] pors::DataSource source(std::uint64_t seed) const {
        if (delimiter.size() != 1) throw CLI::ValidationError("--delimiter", "must be a single character");
        pors::DataSource src;
        src.path = path;
        src.load.label_column = label;
        src.load.delimiter = delimiter[0];
        if (!positive.empty()) src.load.positive_label = positive;
        src.load.drop_columns = drop;
        src.load.categorical_columns = categorical;
        src.split_seed = pors::substream_seed(seed, "split");
        return src;
    }
};

void log(const Globals& g, const std::string& msg) {
    if (g.verbose) std::cerr << msg << '\n';
}

struct Workspace {
    pors::DataSource source;
    pors::Dataset data;
    pors::Splits splits;
    pors::SplitView train;
    pors::SplitView validation;
    pors::SplitView test;

    explicit Workspace(pors::DataSource src)
        : source(std::move(src)),
          data(pors::load_dataset(source.path, source.load)),
          splits(pors::split_dataset(data, pors::SplitSpec{source.split_seed})),
          train(pors::make_view(data, splits.train, "train")),
          validation(pors::make_view(data, splits.validation, "validation")),
          test(pors::make_view(data, splits.test, "test")) {}
};

struct LoadedPool {
    std::unique_ptr<Workspace> ws;
    std::vector<pors::Rule> rules;
    pors::PoolCoverage train;
    pors::PoolCoverage validation;
    pors::PoolCoverage test;
};

LoadedPool load_pool(const std::string& path) {
    const json j = pors::read_json_file(path);
    if (j.value("format", std::string{}) != "pors-rules/1") throw pors::DataError(path + " is not a rule pool file");
    LoadedPool p;
    p.ws = std::make_unique<Workspace>(pors::data_source_from_json(j.at("source")));
    p.rules = pors::rules_from_json(j.at("rules"), p.ws->data);
    if (p.rules.empty()) throw pors::DataError("rule pool is empty");
    p.train = pors::cover_pool(p.rules, p.ws->data, p.ws->train);
    p.validation = pors::cover_pool(p.rules, p.ws->data, p.ws->validation);
    p.test = pors::cover_pool(p.rules, p.ws->data, p.ws->test);
    return p;
}

void write_output(const std::string& path, const json& j) {
    if (path.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        pors::write_json_file(path, j);
    }
}

json subset_record(const pors::RuleSubset& s, const LoadedPool* pool) {
    json j;
    j["rules"] = s.members;
    j["precision"] = s.objective.precision;
    j["recall"] = s.objective.recall;
    if (pool != nullptr) {
        for (const auto* split : {&pool->validation, &pool->test}) {
            const auto p = pors::make_subset(s.members, *split).objective;
            j[split->split] = {{"precision", p.precision}, {"recall", p.recall}};
        }
    }
    return j;
}

std::string escape_json_line(const std::string& what) { return json(what).dump(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pareto-optimal rule subset mining"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "Base seed for every random sub-stream")->capture_default_str();
    app.add_option("--threads", g.threads, "Upper bound on worker threads")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("--verbose", g.verbose, "Progress messages on stderr");

    // prep
    auto* prep = app.add_subcommand("prep", "Load data, report its shape and write the split manifest");
    DataFlags prep_data;
    prep_data.add(prep);
    std::string prep_out;
    prep->add_option("--out-dir", prep_out, "Directory for summary.json and splits.txt")
        ->required()
        ->envname("PORS_OUT_DIR");

    // stage1
    auto* stage1 = app.add_subcommand("stage1", "Generate the Stage-1 rule pool");
    DataFlags s1_data;
    s1_data.add(stage1);
    std::string s1_out;
    std::string s1_kind = "spectral";
    pors::Stage1Spec s1;
    std::vector<double> s1_betas = pors::BetaSpectrum::defaults().betas;
    stage1->add_option("--out", s1_out, "Rule pool file")->required();
    stage1->add_option("--stage1", s1_kind, "Generator")->check(CLI::IsMember({"spectral", "tree"}))->capture_default_str();
    stage1->add_option("--n-rules", s1.n_rules, "Pool size budget")->check(CLI::PositiveNumber)->capture_default_str();
    stage1->add_option("--max-len", s1.max_len, "Maximum conditions per rule")->check(CLI::PositiveNumber)->capture_default_str();
    stage1->add_option("--betas", s1_betas, "F-beta spectrum")->delimiter(',');
    stage1->add_option("--beam-width", s1.beam_width, "Rule growth beam")->check(CLI::PositiveNumber)->capture_default_str();
    stage1->add_option("--max-bins", s1.max_bins, "Bins per feature")->check(CLI::Range(2, 1 << 20))->capture_default_str();
    stage1->add_option("--trees", s1.forest.n_trees, "Forest size (tree generator)")->check(CLI::PositiveNumber)->capture_default_str();

    // pors run
    auto* pors_cmd = app.add_subcommand("pors", "Pareto front expansion");
    pors_cmd->require_subcommand(1);
    auto* pors_run = pors_cmd->add_subcommand("run", "Run the framework on a rule pool");
    std::string pr_pool;
    std::string pr_ssf = "hvc-ss";
    std::string pr_out;
    std::string pr_front_out;
    bool pr_timing = false;
    pors::PorsConfig pr_cfg;
    pors_run->add_option("--pool", pr_pool, "Rule pool file")->required();
    pors_run->add_option("--ssf", pr_ssf, "Selection method")->capture_default_str();
    pors_run->add_option("--k", pr_cfg.ssf.k, "Solutions expanded per round")->check(CLI::PositiveNumber)->capture_default_str();
    pors_run->add_option("--max-rounds", pr_cfg.max_rounds, "Round cap")->check(CLI::PositiveNumber)->capture_default_str();
    pors_run->add_flag("--hvc-previous-front", pr_cfg.ssf.hvc_previous_front,
                       "hvc-ss contributions against the previous round's front");
    pors_run->add_option("--out", pr_out, "Trace file (stdout when omitted)");
    pors_run->add_option("--front-out", pr_front_out, "Best-by-validation front file");
    pors_run->add_flag("--timing", pr_timing, "Include wall-clock seconds in the trace");

    // baseline
    auto* baseline = app.add_subcommand("baseline", "Comparison methods");
    baseline->require_subcommand(1);
    auto* nsga = baseline->add_subcommand("nsga2", "NSGA-II with an unbounded external archive");
    std::string ns_pool;
    std::string ns_out;
    std::string ns_timeline;
    pors::NsgaConfig ns_cfg;
    nsga->add_option("--pool", ns_pool, "Rule pool file")->required();
    nsga->add_option("--out", ns_out, "Archive front file (stdout when omitted)");
    nsga->add_option("--timeline-out", ns_timeline, "Per-generation archive HV and timing");
    nsga->add_option("--population", ns_cfg.population, "Population size")->capture_default_str();
    nsga->add_option("--generations", ns_cfg.generations, "Generations")->capture_default_str();
    nsga->add_option("--mutation-rate", ns_cfg.mutation_rate, "Per-bit flip probability")->capture_default_str();
    nsga->add_option("--crossover-rate", ns_cfg.crossover_rate, "Crossover probability")->capture_default_str();

    auto* greedy = baseline->add_subcommand("greedy", "Beam search by training F-beta");
    std::string gr_pool;
    std::string gr_out;
    double gr_beta = 0.1;
    std::size_t gr_beam = 10;
    greedy->add_option("--pool", gr_pool, "Rule pool file")->required();
    greedy->add_option("--beta", gr_beta, "F-beta weight")->check(CLI::PositiveNumber)->capture_default_str();
    greedy->add_option("--beam", gr_beam, "Beam width")->check(CLI::PositiveNumber)->capture_default_str();
    greedy->add_option("--out", gr_out, "Result file (stdout when omitted)");

    // select
    auto* select = app.add_subcommand("select", "Pick one entry of a finished front");
    std::string sel_front;
    std::string sel_out;
    std::optional<double> sel_theta;
    std::optional<double> sel_beta;
    select->add_option("--front", sel_front, "Front file")->required()->check(CLI::ExistingFile);
    auto* theta_opt = select->add_option("--min-precision", sel_theta, "Max recall subject to precision >= value");
    auto* beta_opt = select->add_option("--beta", sel_beta, "Max F-beta");
    theta_opt->excludes(beta_opt);
    select->add_option("--out", sel_out, "Result file (stdout when omitted)");

    // experiment run
    auto* experiment = app.add_subcommand("experiment", "Repeated seeded trials");
    experiment->require_subcommand(1);
    auto* exp_run = experiment->add_subcommand("run", "Run a plan file");
    std::string ex_plan;
    std::string ex_out;
    std::string ex_format = "both";
    exp_run->add_option("--plan", ex_plan, "Plan file")->required()->check(CLI::ExistingFile);
    exp_run->add_option("--out-dir", ex_out, "Output directory")->required()->envname("PORS_OUT_DIR");
    exp_run->add_option("--format", ex_format, "Table format")
        ->check(CLI::IsMember({"csv", "json", "both"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
        if (select->parsed() && !sel_theta && !sel_beta) {
            throw CLI::RequiredError("--min-precision or --beta");
        }
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << "\n\n" << app.help() << '\n';
        return 2;
    }

    try {
        if (prep->parsed()) {
            const auto src = prep_data.source(g.seed);
            const pors::Dataset d = pors::load_dataset(src.path, src.load);
            const auto splits = pors::split_dataset(d, pors::SplitSpec{src.split_seed});
            fs::create_directories(prep_out);
            pors::write_split_manifest(fs::path(prep_out) / "splits.txt", splits, src.split_seed);
            json summary;
            summary["source"] = pors::to_json(src);
            summary["rows"] = d.n_rows();
            summary["features"] = d.n_features();
            summary["positives"] = d.positive_index().size();
            summary["positive_ratio"] = d.positive_ratio();
            summary["splits"] = {{"train", splits.train.size()},
                                 {"validation", splits.validation.size()},
                                 {"test", splits.test.size()}};
            pors::write_json_file(fs::path(prep_out) / "summary.json", summary);
            std::cout << summary.dump(2) << '\n';
        } else if (stage1->parsed()) {
            s1.kind = s1_kind == "tree" ? pors::Stage1Spec::Kind::kTree : pors::Stage1Spec::Kind::kSpectral;
            s1.spectrum.betas = s1_betas;
            Workspace ws(s1_data.source(g.seed));
            const auto t0 = std::chrono::steady_clock::now();
            const auto rules =
                pors::build_stage1(ws.data, ws.train, s1, pors::substream_seed(g.seed, "stage1"), g.threads);
            log(g, "stage1: " + std::to_string(rules.size()) + " rules in " +
                       std::to_string(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()) +
                       " s");
            pors::write_rule_pool(s1_out, ws.source, rules, ws.data);
        } else if (pors_run->parsed()) {
            pr_cfg.ssf.kind = pors::parse_ssf(pr_ssf);
            pr_cfg.seed = pors::substream_seed(g.seed, "ssf");
            pr_cfg.threads = g.threads;
            const LoadedPool pool = load_pool(pr_pool);
            const auto trace = pors::run_pors(pool.train, &pool.validation, pr_cfg, [&](const pors::PorsSnapshot& s) {
                log(g, "round " + std::to_string(s.iteration) + ": |F|=" + std::to_string(s.front.size()) +
                           " train HV=" + std::to_string(s.train_hv));
            });
            write_output(pr_out, pors::trace_to_json(trace, pr_cfg, pr_timing));
            if (!pr_front_out.empty()) {
                pors::write_json_file(pr_front_out,
                                      pors::front_to_json(trace.snapshots[trace.best_snapshot()].front, "train"));
            }
        } else if (nsga->parsed()) {
            ns_cfg.seed = pors::substream_seed(g.seed, "nsga2");
            ns_cfg.threads = g.threads;
            const LoadedPool pool = load_pool(ns_pool);
            const auto res = pors::nsga2_run(pool.train, ns_cfg);
            json out = pors::front_to_json(res.archive, "train");
            out["validation_hv"] = pors::split_hypervolume(res.archive, pool.validation);
            out["test_hv"] = pors::split_hypervolume(res.archive, pool.test);
            out["evaluations"] = res.evaluations;
            write_output(ns_out, out);
            if (!ns_timeline.empty()) {
                json tl = json::array();
                for (const auto& p : res.timeline) {
                    tl.push_back({{"generation", p.generation},
                                  {"evaluations", p.evaluations},
                                  {"archive_hv", p.archive_hv},
                                  {"elapsed_seconds", p.elapsed_seconds}});
                }
                pors::write_json_file(ns_timeline, tl);
            }
        } else if (greedy->parsed()) {
            const LoadedPool pool = load_pool(gr_pool);
            const auto res = pors::greedy_fbeta(pool.train, gr_beta, gr_beam, &pool.validation);
            json out = subset_record(res.subset, &pool);
            out["beta"] = gr_beta;
            out["beam"] = gr_beam;
            out["train_score"] = res.train_score;
            out["validation_score"] = res.validation_score ? json(*res.validation_score) : json(nullptr);
            out["step_scores"] = res.step_scores;
            write_output(gr_out, out);
        } else if (select->parsed()) {
            const pors::ParetoFront front = pors::front_from_json(pors::read_json_file(sel_front));
            pors::SelectCriterion crit;
            if (sel_theta) {
                crit = {pors::SelectCriterion::Mode::kMinPrecision, *sel_theta};
            } else {
                crit = {pors::SelectCriterion::Mode::kFBeta, *sel_beta};
            }
            const auto idx = pors::front_select(front, crit);
            json out;
            out["criterion"] = sel_theta ? json{{"min_precision", *sel_theta}} : json{{"beta", *sel_beta}};
            out["selected"] = idx ? subset_record(front[*idx], nullptr) : json(nullptr);
            if (idx && sel_beta) {
                out["selected"]["f_beta"] =
                    pors::f_beta(front[*idx].objective.precision, front[*idx].objective.recall, *sel_beta);
            }
            write_output(sel_out, out);
        } else if (exp_run->parsed()) {
            auto plan = pors::ExperimentPlan::from_json(pors::read_json_file(ex_plan));
            if (g.threads > 1) plan.threads = g.threads;
            plan.base_seed = app.get_option("--seed")->count() > 0 ? g.seed : plan.base_seed;
            const fs::path out_dir(ex_out);
            fs::create_directories(out_dir / "traces");
            const auto table = pors::run_experiment(plan, out_dir / "traces");
            if (ex_format == "csv" || ex_format == "both") pors::export_results(table, "csv", out_dir / "results.csv");
            if (ex_format == "json" || ex_format == "both") {
                pors::export_results(table, "json", out_dir / "results.json");
            }
            std::cout << pors::results_csv(table);
        }
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":" << escape_json_line(e.what()) << "}" << std::endl;
        return 1;
    }
    return 0;
}
