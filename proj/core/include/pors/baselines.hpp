#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pors/pareto.hpp"

namespace pors {

struct NsgaConfig {
    std::size_t population = 50;
    std::size_t generations = 1000;
    double mutation_rate = 0.02;
    double crossover_rate = 0.9;
    std::uint64_t seed = 0;
    std::size_t threads = 1;

    /// Throws std::invalid_argument unless population is even and >= 4 and rates lie in [0, 1].
    void validate() const;
};

struct NsgaProgress {
    std::size_t generation = 0;  // 0 is the initial population
    std::size_t evaluations = 0;
    double archive_hv = 0.0;
    double elapsed_seconds = 0.0;
};

struct NsgaResult {
    ParetoFront archive;            // makePF of every evaluated genome
    ParetoFront population_front;   // non-dominated part of the last population
    std::vector<NsgaProgress> timeline;
    std::size_t evaluations = 0;
};

using NsgaCallback = std::function<void(const NsgaProgress&)>;

/// NSGA-II over subset bitstrings with an unbounded external archive.
/// Throws std::invalid_argument on an empty pool.
NsgaResult nsga2_run(const PoolCoverage& train, const NsgaConfig& cfg, const NsgaCallback& on_generation = {});

struct GreedyResult {
    RuleSubset subset;  // training objective
    double train_score = 0.0;
    std::optional<double> validation_score;
    std::vector<double> step_scores;  // best beam score after each accepted step
};

/// Beam search over subsets by training F-beta; stops when a step does not
/// strictly improve the best score. Throws std::invalid_argument on an empty
/// pool, beam = 0 or beta <= 0.
GreedyResult greedy_fbeta(const PoolCoverage& train, double beta, std::size_t beam,
                          const PoolCoverage* validation = nullptr);

struct SelectCriterion {
    enum class Mode { kMinPrecision, kFBeta };
    Mode mode = Mode::kMinPrecision;
    double value = 0.9;  // theta or beta
};

/// Index of the chosen entry: max recall among entries with precision >= theta
/// (none when no entry qualifies), or max F-beta with ties to higher precision.
std::optional<std::size_t> front_select(const ParetoFront& front, const SelectCriterion& criterion);

}  // namespace pors
