#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pors/baselines.hpp"
#include "pors/framework.hpp"
#include "pors/induction.hpp"
#include "pors/serialization.hpp"

namespace pors {

struct Stage1Spec {
    enum class Kind { kSpectral, kTree };
    Kind kind = Kind::kSpectral;
    std::size_t n_rules = 500;
    std::size_t max_len = kDefaultMaxRuleLength;
    std::size_t beam_width = 1;
    std::size_t max_bins = kDefaultMaxBins;
    BetaSpectrum spectrum = BetaSpectrum::defaults();
    ForestConfig forest;
};

struct MethodSpec {
    enum class Kind { kPors, kNsga2, kGreedy };
    Kind kind = Kind::kPors;
    SsfKind ssf = SsfKind::kHvc;

    /// "pors:hvc-ss", "nsga2", "greedy".
    [[nodiscard]] std::string label() const;
    /// Throws std::invalid_argument on an unknown name.
    static MethodSpec parse(const std::string& label);
};

struct ExperimentPlan {
    std::string dataset_name;
    DataSource data;
    Stage1Spec stage1;
    std::vector<MethodSpec> methods;
    std::size_t trials = 5;
    std::uint64_t base_seed = 0;
    std::vector<std::size_t> k_values{10};
    std::size_t max_rounds = kDefaultMaxRounds;
    bool hvc_previous_front = false;
    NsgaConfig nsga;
    double greedy_beta = 0.1;
    std::size_t greedy_beam = 10;
    std::vector<double> min_precisions;  // front_select thresholds
    std::vector<double> select_betas;    // front_select F-beta weights
    std::size_t threads = 1;

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
    static ExperimentPlan from_json(const nlohmann::json& j);
    [[nodiscard]] nlohmann::json to_json() const;
};

/// Outcome of one method (and k) on one trial.
struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::size_t k = 0;  // 0 for methods without k
    double test_hv = 0.0;          // best-by-validation front, evaluated on test
    double final_test_hv = 0.0;    // last front, evaluated on test
    double validation_hv = 0.0;
    double train_hv = 0.0;
    double seconds = 0.0;          // method only
    double stage1_seconds = 0.0;
    std::size_t pool_size = 0;
    std::size_t iterations = 0;
    std::size_t best_iteration = 0;
    /// Test recall at each precision threshold (NaN when nothing qualifies)
    /// and test F-beta per weight, keyed "recall@p>=0.5", "f@beta=0.1".
    std::map<std::string, double> selections;
};

struct PoolStats {
    std::size_t trial = 0;
    std::size_t size = 0;
    double precision_mean = 0.0;
    double precision_std = 0.0;
    double recall_mean = 0.0;
    double recall_std = 0.0;
};

struct ResultCell {
    std::string dataset;
    std::string method;
    std::size_t k = 0;
    std::size_t trials = 0;
    double mean_test_hv = 0.0;
    double std_test_hv = 0.0;
    bool single_trial = false;  // std is reported as 0
    double mean_final_test_hv = 0.0;
    double mean_seconds = 0.0;
    std::map<std::string, double> selection_means;
};

struct ResultTable {
    std::vector<ResultCell> cells;
    std::vector<TrialRecord> records;
    std::vector<PoolStats> pools;

    [[nodiscard]] const ResultCell* find(const std::string& method, std::size_t k) const;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;  // sample (n - 1); 0 for a single value
};

/// Order-independent: values are summed in sorted order. Any NaN makes both NaN.
MeanStd mean_std(std::vector<double> values);

/// Per-rule precision and recall spread of a pool on its training split.
PoolStats pool_stats(const PoolCoverage& train);

/// Builds the Stage-1 pool for one split.
std::vector<Rule> build_stage1(const Dataset& d, const SplitView& train, const Stage1Spec& spec, std::uint64_t seed,
                               std::size_t threads = 1);

/// Runs every method on every trial and aggregates. `trace_dir`, when set,
/// receives one PORS trace file per (trial, method, k).
ResultTable run_experiment(const ExperimentPlan& plan, const Dataset& d,
                           const std::optional<std::filesystem::path>& trace_dir = std::nullopt);
ResultTable run_experiment(const ExperimentPlan& plan,
                           const std::optional<std::filesystem::path>& trace_dir = std::nullopt);

/// "0.5931" for 0.59312.
std::string format_fixed4(double x);

/// Throws std::invalid_argument on an empty table and DataError on I/O failure.
void export_results(const ResultTable& table, const std::string& format, const std::filesystem::path& path);
std::string results_csv(const ResultTable& table);
nlohmann::json results_json(const ResultTable& table);

}  // namespace pors
