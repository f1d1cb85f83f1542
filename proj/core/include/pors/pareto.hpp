#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "pors/rules.hpp"

namespace pors {

/// a Pareto-dominates b: no worse in precision and recall, strictly better in one.
bool dominates(const ObjectivePoint& a, const ObjectivePoint& b);

/// Mutually non-dominated rule subsets with distinct objective points,
/// sorted by recall ascending (so precision is strictly descending).
/// Only make_pareto_front builds one.
class ParetoFront {
  public:
    ParetoFront() = default;

    [[nodiscard]] const std::vector<RuleSubset>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }
    [[nodiscard]] const RuleSubset& operator[](std::size_t i) const { return entries_[i]; }
    [[nodiscard]] double hypervolume() const noexcept { return hv_; }
    [[nodiscard]] std::vector<ObjectivePoint> points() const;

    /// Same canonical solutions with the same objective points.
    friend bool operator==(const ParetoFront& a, const ParetoFront& b);

  private:
    friend ParetoFront make_pareto_front(std::vector<RuleSubset> solutions);

    std::vector<RuleSubset> entries_;
    double hv_ = 0.0;
};

/// Keeps the non-dominated solutions; among identical objective points the
/// lexicographically smallest member list survives. Sort-and-sweep, O(m log m).
ParetoFront make_pareto_front(std::vector<RuleSubset> solutions);

/// Area dominated by `points`, referenced at (0, 0). Dominated points are
/// ignored. Throws std::invalid_argument on negative coordinates.
double hypervolume(std::span<const ObjectivePoint> points);

/// HV(T ∪ S) - HV(S \ T); set difference by objective-point identity.
double hv_contribution(std::span<const ObjectivePoint> t, std::span<const ObjectivePoint> s);
/// Same, with set difference by canonical member list.
double hv_contribution(std::span<const RuleSubset> t, std::span<const RuleSubset> s);

/// Mean over reference points of the Euclidean distance to the nearest candidate.
double igd(std::span<const ObjectivePoint> candidates, std::span<const ObjectivePoint> reference);
/// IGD with the shortfall distance ||(max(r.p - a.p, 0), max(r.r - a.r, 0))||.
double igd_plus(std::span<const ObjectivePoint> candidates, std::span<const ObjectivePoint> reference);

double euclidean(const ObjectivePoint& a, const ObjectivePoint& b);
/// Shortfall of candidate `a` relative to reference `r` (maximization form).
double shortfall_distance(const ObjectivePoint& r, const ObjectivePoint& a);

}  // namespace pors
