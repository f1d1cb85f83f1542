#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pors/dataset.hpp"

namespace pors {

using RuleIndex = std::uint32_t;

inline constexpr std::size_t kDefaultMaxRuleLength = 6;

/// Exact counts behind an objective point; lets dominance and dedup compare
/// rationals by cross-multiplication instead of rounded doubles.
struct ObjectiveCounts {
    std::uint64_t covered = 0;
    std::uint64_t covered_positive = 0;
    std::uint64_t positives = 0;

    friend bool operator==(const ObjectiveCounts&, const ObjectiveCounts&) = default;
};

/// (precision, recall) image of a rule subset. Points built from counts
/// carry them; bare points (tests, external fronts) compare as doubles.
struct ObjectivePoint {
    double precision = 0.0;
    double recall = 0.0;
    std::optional<ObjectiveCounts> counts;

    static ObjectivePoint from_counts(std::uint64_t covered, std::uint64_t covered_positive, std::uint64_t positives);
};

std::partial_ordering compare_precision(const ObjectivePoint& a, const ObjectivePoint& b);
std::partial_ordering compare_recall(const ObjectivePoint& a, const ObjectivePoint& b);
/// Both coordinates equal (exactly, when counts are available).
bool same_point(const ObjectivePoint& a, const ObjectivePoint& b);

/// A positive-class rule: conjunction of conditions with its coverage on the
/// training split.
struct Rule {
    RuleIndex id = 0;
    std::vector<Condition> conditions;
    Coverage coverage;
    std::string provenance;
};

/// Sorts conditions into canonical order so equal conjunctions compare equal.
std::vector<Condition> canonical_conditions(std::vector<Condition> conditions);

/// "IF f1 <= v AND f2 = c THEN 1"
std::string rule_text(const Rule& rule, const Dataset& d);

/// Coverage of a rule re-derived by applying its conditions to `view`.
Coverage apply_rule(const Rule& rule, const Dataset& d, const SplitView& view);

/// A subset of a rule pool. `members` is sorted ascending (canonical form).
struct RuleSubset {
    std::vector<RuleIndex> members;
    Coverage coverage;
    ObjectivePoint objective;
};

/// Per-rule coverage of a pool on one split; the basis for evaluating any
/// subset on that split.
struct PoolCoverage {
    std::string split;
    std::size_t n_rows = 0;
    std::size_t n_positive = 0;
    Bitset positives;
    std::vector<Coverage> rules;

    [[nodiscard]] std::size_t size() const noexcept { return rules.size(); }
};

/// Re-applies every rule's conditions on `view` (training bitsets are never reused).
PoolCoverage cover_pool(std::span<const Rule> pool, const Dataset& d, const SplitView& view);

/// Bitwise OR of the members' coverages. Throws std::out_of_range on an unknown id.
Coverage union_coverage(std::span<const RuleIndex> members, const PoolCoverage& pool);

/// Precision (0 when nothing is covered) and recall of a coverage whose
/// split holds `n_positive` positives. Throws when n_positive is 0.
ObjectivePoint evaluate_metrics(const Coverage& c, std::size_t n_positive);

/// Builds the canonical subset (sorted, deduplicated members) with coverage
/// and objective on `pool`'s split.
RuleSubset make_subset(std::vector<RuleIndex> members, const PoolCoverage& pool);

/// (1 + b^2) p r / (b^2 p + r); 0 when p = r = 0.
double f_beta(double precision, double recall, double beta);

/// 1 - |A ∩ B| / |A ∪ B|; two empty coverages are at distance 0.
double jaccard_distance(const Coverage& a, const Coverage& b);
double jaccard_distance(const Bitset& a, const Bitset& b);

}  // namespace pors
