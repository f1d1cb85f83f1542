#include "pors/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace pors {

bool dominates(const ObjectivePoint& a, const ObjectivePoint& b) {
    const auto p = compare_precision(a, b);
    const auto r = compare_recall(a, b);
    return p >= 0 && r >= 0 && (p > 0 || r > 0);
}

namespace {

// Recall descending, then precision descending.
bool sweep_order(const ObjectivePoint& a, const ObjectivePoint& b) {
    const auto r = compare_recall(a, b);
    if (r != 0) return r > 0;
    return compare_precision(a, b) > 0;
}

// Indices of the non-dominated, point-distinct subset in recall-ascending
// order. `tie_less(i, j)` orders identical points; the first one wins.
template <typename TieLess>
std::vector<std::size_t> nondominated_indices(std::span<const ObjectivePoint> pts, TieLess tie_less) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (sweep_order(pts[i], pts[j])) return true;
        if (sweep_order(pts[j], pts[i])) return false;
        return tie_less(i, j);
    });
    std::vector<std::size_t> kept;
    const ObjectivePoint* best = nullptr;  // highest precision seen so far
    for (const std::size_t i : order) {
        if (best == nullptr || compare_precision(pts[i], *best) > 0) {
            kept.push_back(i);
            best = &pts[i];
        }
    }
    std::reverse(kept.begin(), kept.end());
    return kept;
}

void check_nonnegative(std::span<const ObjectivePoint> pts) {
    for (const auto& p : pts) {
        if (!(p.precision >= 0.0) || !(p.recall >= 0.0)) {
            throw std::invalid_argument("hypervolume requires non-negative coordinates");
        }
    }
}

bool same_members(const RuleSubset& a, const RuleSubset& b) { return a.members == b.members; }

}  // namespace

std::vector<ObjectivePoint> ParetoFront::points() const {
    std::vector<ObjectivePoint> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.objective);
    return out;
}

bool operator==(const ParetoFront& a, const ParetoFront& b) {
    if (a.entries_.size() != b.entries_.size()) return false;
    for (std::size_t i = 0; i < a.entries_.size(); ++i) {
        if (a.entries_[i].members != b.entries_[i].members ||
            !same_point(a.entries_[i].objective, b.entries_[i].objective)) {
            return false;
        }
    }
    return true;
}

ParetoFront make_pareto_front(std::vector<RuleSubset> solutions) {
    std::vector<ObjectivePoint> pts;
    pts.reserve(solutions.size());
    for (const auto& s : solutions) pts.push_back(s.objective);
    const auto kept = nondominated_indices(
        pts, [&](std::size_t i, std::size_t j) { return solutions[i].members < solutions[j].members; });

    ParetoFront front;
    front.entries_.reserve(kept.size());
    for (const std::size_t i : kept) {
        front.entries_.push_back(std::move(solutions[i]));
    }
    double area = 0.0;
    double prev_recall = 0.0;
    for (const auto& e : front.entries_) {
        area += e.objective.precision * (e.objective.recall - prev_recall);
        prev_recall = e.objective.recall;
    }
    front.hv_ = area;
    return front;
}

double hypervolume(std::span<const ObjectivePoint> points) {
    check_nonnegative(points);
    const auto kept = nondominated_indices(points, [](std::size_t i, std::size_t j) { return i < j; });
    double area = 0.0;
    double prev_recall = 0.0;
    for (const std::size_t i : kept) {
        area += points[i].precision * (points[i].recall - prev_recall);
        prev_recall = points[i].recall;
    }
    return area;
}

double hv_contribution(std::span<const ObjectivePoint> t, std::span<const ObjectivePoint> s) {
    std::vector<ObjectivePoint> uni(s.begin(), s.end());
    uni.insert(uni.end(), t.begin(), t.end());
    std::vector<ObjectivePoint> rest;
    for (const auto& p : s) {
        const bool in_t = std::any_of(t.begin(), t.end(), [&](const ObjectivePoint& q) { return same_point(p, q); });
        if (!in_t) rest.push_back(p);
    }
    return hypervolume(uni) - hypervolume(rest);
}

double hv_contribution(std::span<const RuleSubset> t, std::span<const RuleSubset> s) {
    std::vector<ObjectivePoint> uni;
    std::vector<ObjectivePoint> rest;
    for (const auto& x : s) {
        uni.push_back(x.objective);
        const bool in_t = std::any_of(t.begin(), t.end(), [&](const RuleSubset& y) { return same_members(x, y); });
        if (!in_t) rest.push_back(x.objective);
    }
    for (const auto& y : t) uni.push_back(y.objective);
    return hypervolume(uni) - hypervolume(rest);
}

double euclidean(const ObjectivePoint& a, const ObjectivePoint& b) {
    return std::hypot(a.precision - b.precision, a.recall - b.recall);
}

double shortfall_distance(const ObjectivePoint& r, const ObjectivePoint& a) {
    return std::hypot(std::max(r.precision - a.precision, 0.0), std::max(r.recall - a.recall, 0.0));
}

namespace {

template <typename Dist>
double inverted_distance(std::span<const ObjectivePoint> candidates, std::span<const ObjectivePoint> reference,
                         Dist dist) {
    if (reference.empty()) throw std::invalid_argument("IGD reference set is empty");
    if (candidates.empty()) throw std::invalid_argument("IGD candidate set is empty");
    double total = 0.0;
    for (const auto& r : reference) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& a : candidates) best = std::min(best, dist(r, a));
        total += best;
    }
    return total / static_cast<double>(reference.size());
}

}  // namespace

double igd(std::span<const ObjectivePoint> candidates, std::span<const ObjectivePoint> reference) {
    return inverted_distance(candidates, reference, [](const auto& r, const auto& a) { return euclidean(r, a); });
}

double igd_plus(std::span<const ObjectivePoint> candidates, std::span<const ObjectivePoint> reference) {
    return inverted_distance(candidates, reference,
                             [](const auto& r, const auto& a) { return shortfall_distance(r, a); });
}

}  // namespace pors
