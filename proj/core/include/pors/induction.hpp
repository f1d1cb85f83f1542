#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "pors/dataset.hpp"
#include "pors/rules.hpp"

namespace pors {

struct InductionConfig {
    std::size_t max_len = kDefaultMaxRuleLength;
    double beta = 1.0;
    std::size_t beam_width = 1;

    void validate() const;
};

/// Ordered F-beta weights for SpectralRules.
struct BetaSpectrum {
    std::vector<double> betas;

    static BetaSpectrum defaults();
    /// Throws std::invalid_argument unless non-empty, positive and strictly increasing.
    void validate() const;
};

/// Training split plus its candidate conditions (coverage over the split).
struct InductionData {
    const Dataset* dataset = nullptr;
    SplitView train;
    std::vector<CoveredCondition> conditions;
};

InductionData prepare_induction(const Dataset& d, SplitView train, std::size_t max_bins = kDefaultMaxBins);

/// Result of one rule growth: indices into the condition pool (sorted) and
/// the conjunction's coverage on the full training split.
struct InducedRule {
    std::vector<std::size_t> condition_ids;
    Coverage coverage;
    double score = 0.0;  // F-beta on the residual rows
};

/// Greedy (beam) top-down growth scored by F-beta on `residual` rows.
/// Returns none when no candidate covers a residual positive.
/// Throws std::invalid_argument on an empty condition pool.
std::optional<InducedRule> induce_rule(const InductionData& data, const Bitset& residual,
                                       const InductionConfig& cfg);

/// Up to n rules; every covered row (positive or not) leaves the residual
/// after each rule. Rules carry full-training coverage; ids are 0..m-1.
std::vector<Rule> sequential_covering(const InductionData& data, std::size_t n, const InductionConfig& cfg);

/// Sequential covering with budget ceil(n/|B|) per beta, residual reset per
/// beta, duplicates (same condition multiset) dropped keeping the first.
/// Throws std::invalid_argument when n < |B|.
std::vector<Rule> spectral_rules(const InductionData& data, std::size_t n, const BetaSpectrum& spectrum,
                                 const InductionConfig& base, std::size_t threads = 1);

struct ForestConfig {
    std::size_t n_trees = 200;
    std::size_t max_depth = kDefaultMaxRuleLength;
    std::size_t min_leaf = 5;
    /// Features tried per node; 0 means ceil(sqrt(n_features)).
    std::size_t max_features = 0;
    std::uint64_t seed = 0;
};

/// Randomized forest over the pool's split conditions; positive-majority
/// leaves become rules, ranked by training F-0.1, top n distinct returned.
std::vector<Rule> tree_rules(const InductionData& data, std::size_t n, const ForestConfig& cfg,
                             std::size_t threads = 1);

/// Builds a rule (full-training coverage) from pool condition indices.
Rule make_rule(const InductionData& data, std::span<const std::size_t> condition_ids, std::string provenance);

}  // namespace pors
