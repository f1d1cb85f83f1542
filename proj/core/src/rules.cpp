#include "pors/rules.hpp"

#include <algorithm>
#include <stdexcept>

#include "pors/random.hpp"

namespace pors {

ObjectivePoint ObjectivePoint::from_counts(std::uint64_t covered, std::uint64_t covered_positive,
                                           std::uint64_t positives) {
    ObjectivePoint p;
    p.precision = covered == 0 ? 0.0 : static_cast<double>(covered_positive) / static_cast<double>(covered);
    p.recall = positives == 0 ? 0.0 : static_cast<double>(covered_positive) / static_cast<double>(positives);
    p.counts = ObjectiveCounts{covered, covered_positive, positives};
    return p;
}

namespace {

using u128 = uint128;

// a/b vs c/d with b, d > 0.
std::strong_ordering compare_ratio(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    const u128 lhs = static_cast<u128>(a) * d;
    const u128 rhs = static_cast<u128>(c) * b;
    return lhs < rhs ? std::strong_ordering::less
                     : (lhs > rhs ? std::strong_ordering::greater : std::strong_ordering::equal);
}

}  // namespace

std::partial_ordering compare_precision(const ObjectivePoint& a, const ObjectivePoint& b) {
    if (a.counts && b.counts) {
        // Empty coverage has precision 0, i.e. 0/1.
        const auto an = a.counts->covered == 0 ? 0 : a.counts->covered_positive;
        const auto ad = a.counts->covered == 0 ? 1 : a.counts->covered;
        const auto bn = b.counts->covered == 0 ? 0 : b.counts->covered_positive;
        const auto bd = b.counts->covered == 0 ? 1 : b.counts->covered;
        return compare_ratio(an, ad, bn, bd);
    }
    return a.precision <=> b.precision;
}

std::partial_ordering compare_recall(const ObjectivePoint& a, const ObjectivePoint& b) {
    if (a.counts && b.counts && a.counts->positives > 0 && b.counts->positives > 0) {
        return compare_ratio(a.counts->covered_positive, a.counts->positives, b.counts->covered_positive,
                             b.counts->positives);
    }
    return a.recall <=> b.recall;
}

bool same_point(const ObjectivePoint& a, const ObjectivePoint& b) {
    return compare_precision(a, b) == 0 && compare_recall(a, b) == 0;
}

std::vector<Condition> canonical_conditions(std::vector<Condition> conditions) {
    std::sort(conditions.begin(), conditions.end(),
              [](const Condition& a, const Condition& b) { return (a <=> b) < 0; });
    return conditions;
}

std::string rule_text(const Rule& rule, const Dataset& d) {
    std::string out = "IF ";
    for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
        if (i > 0) out += " AND ";
        out += describe(rule.conditions[i], d);
    }
    out += " THEN 1";
    return out;
}

Coverage apply_rule(const Rule& rule, const Dataset& d, const SplitView& view) {
    Bitset bits(view.size());
    for (std::size_t i = 0; i < view.rows.size(); ++i) {
        const RowId row = view.rows[i];
        const bool all = std::all_of(rule.conditions.begin(), rule.conditions.end(),
                                     [&](const Condition& c) { return c.matches(d, row); });
        if (all) bits.set(i);
    }
    return Coverage(std::move(bits), view.positives);
}

PoolCoverage cover_pool(std::span<const Rule> pool, const Dataset& d, const SplitView& view) {
    PoolCoverage out;
    out.split = view.name;
    out.n_rows = view.size();
    out.n_positive = view.n_positive;
    out.positives = view.positives;
    out.rules.reserve(pool.size());
    for (const Rule& r : pool) {
        out.rules.push_back(apply_rule(r, d, view));
    }
    return out;
}

Coverage union_coverage(std::span<const RuleIndex> members, const PoolCoverage& pool) {
    Bitset bits(pool.n_rows);
    for (const RuleIndex m : members) {
        if (m >= pool.rules.size()) {
            throw std::out_of_range("unknown rule id " + std::to_string(m));
        }
        bits |= pool.rules[m].bits();
    }
    return Coverage(std::move(bits), pool.positives);
}

ObjectivePoint evaluate_metrics(const Coverage& c, std::size_t n_positive) {
    if (n_positive == 0) {
        throw std::invalid_argument("evaluation split has no positive rows");
    }
    return ObjectivePoint::from_counts(c.covered(), c.covered_positive(), n_positive);
}

RuleSubset make_subset(std::vector<RuleIndex> members, const PoolCoverage& pool) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    RuleSubset s;
    s.coverage = union_coverage(members, pool);
    s.objective = evaluate_metrics(s.coverage, pool.n_positive);
    s.members = std::move(members);
    return s;
}

double f_beta(double precision, double recall, double beta) {
    if (!(beta > 0.0)) {
        throw std::invalid_argument("beta must be positive");
    }
    const double b2 = beta * beta;
    const double denom = b2 * precision + recall;
    if (denom <= 0.0) {
        return 0.0;
    }
    return (1.0 + b2) * precision * recall / denom;
}

double jaccard_distance(const Bitset& a, const Bitset& b) {
    const std::size_t uni = or_count(a, b);
    if (uni == 0) {
        return 0.0;
    }
    return 1.0 - static_cast<double>(and_count(a, b)) / static_cast<double>(uni);
}

double jaccard_distance(const Coverage& a, const Coverage& b) { return jaccard_distance(a.bits(), b.bits()); }

}  // namespace pors
